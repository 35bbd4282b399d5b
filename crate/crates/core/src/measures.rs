//! Closed-form information functionals and the coherence measures built on them.
//!
//! Entropies are in bits. Skew information and quantum Fisher information are
//! evaluated from the spectral decomposition of the state:
//!
//! - `I(s, K) = 1/2 sum_{jk} (sqrt(l_j) - sqrt(l_k))^2 |K_jk|^2`
//! - `F(s, H) = 1/2 sum_{jk} (l_j - l_k)^2 / (l_j + l_k) |H_jk|^2`
//!
//! The Fisher information uses the `1/4 tr(s L^2)` normalization, so that
//! `I <= F <= 2 I` and both reduce to the variance on pure states.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Result};
use crate::linalg::{eigh, ComplexMatrix, SpectralDecomposition, HERMITIAN_TOL};
use crate::measurements::{LuedersMeasurement, VonNeumannMeasurement};
use crate::states::{dephase, BipartiteState, DensityMatrix};

/// Pairs with `l_j + l_k` at or below this are dropped from the QFI sum.
pub const QFI_DEGENERACY_CUTOFF: f64 = 1e-12;
/// Round-off negatives down to this are reported as zero.
/// Eigenvalues below this (relative) are treated as exact zeros.
pub const EIGEN_FLOOR: f64 = 1e-14;
pub const NEGATIVE_CLIP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    L1,
    RelEntropy,
    Skew,
    Qfi,
    PartialSkew,
    PartialQfi,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::L1,
        MeasureKind::RelEntropy,
        MeasureKind::Skew,
        MeasureKind::Qfi,
        MeasureKind::PartialSkew,
        MeasureKind::PartialQfi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::L1 => "l1",
            MeasureKind::RelEntropy => "rel_entropy",
            MeasureKind::Skew => "skew",
            MeasureKind::Qfi => "qfi",
            MeasureKind::PartialSkew => "partial_skew",
            MeasureKind::PartialQfi => "partial_qfi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s.trim())
    }

    pub fn is_partial(self) -> bool {
        matches!(self, MeasureKind::PartialSkew | MeasureKind::PartialQfi)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A measure evaluation tagged with what was computed and in which basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub measure: MeasureKind,
    pub value: f64,
    pub basis_tag: String,
}

impl MeasureValue {
    pub fn new(measure: MeasureKind, value: f64, basis_tag: impl Into<String>) -> Self {
        let value = if (-NEGATIVE_CLIP..0.0).contains(&value) { 0.0 } else { value };
        Self {
            measure,
            value,
            basis_tag: basis_tag.into(),
        }
    }
}

/// `-sum l log2 l`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum()
}

fn check_observable(sigma: &DensityMatrix, k: &ComplexMatrix) -> Result<()> {
    k.ensure_hermitian(HERMITIAN_TOL)?;
    if k.dim() != sigma.dim() {
        return Err(dim_mismatch(sigma.dim(), k.dim()));
    }
    Ok(())
}

/// Spectral data of a state with eigenvalues clipped at zero.
pub(crate) struct Spectrum {
    spec: SpectralDecomposition,
}

impl Spectrum {
    pub(crate) fn of(rho: &ComplexMatrix) -> Self {
        let mut spec = eigh(rho);
        // Round-off eigenvalues of rank-deficient states would otherwise enter
        // through their square roots at the 1e-8 level.
        let floor = EIGEN_FLOOR * spec.eigenvalues.iter().fold(1.0f64, |m, l| m.max(l.abs()));
        for l in spec.eigenvalues.iter_mut() {
            if *l < floor {
                *l = 0.0;
            }
        }
        Self { spec }
    }

    /// `sqrt(rho)` from the floored spectrum.
    pub(crate) fn sqrt(&self) -> ComplexMatrix {
        self.spec.map_eigenvalues(f64::sqrt)
    }

    pub(crate) fn skew(&self, k: &ComplexMatrix) -> f64 {
        let kt = self.spec.in_eigenbasis(k);
        let roots: Vec<f64> = self.spec.eigenvalues.iter().map(|l| l.sqrt()).collect();
        let d = roots.len();
        let mut acc = 0.0;
        for j in 0..d {
            for m in (j + 1)..d {
                let diff = roots[j] - roots[m];
                acc += diff * diff * kt[(j, m)].norm_sqr();
            }
        }
        // Off-diagonal pairs counted once, so the 1/2 prefactor cancels the symmetry.
        acc
    }

    pub(crate) fn qfi(&self, h: &ComplexMatrix) -> f64 {
        let ht = self.spec.in_eigenbasis(h);
        let l = &self.spec.eigenvalues;
        let d = l.len();
        let mut acc = 0.0;
        for j in 0..d {
            for m in (j + 1)..d {
                let s = l[j] + l[m];
                if s <= QFI_DEGENERACY_CUTOFF {
                    continue;
                }
                let diff = l[j] - l[m];
                acc += diff * diff / s * ht[(j, m)].norm_sqr();
            }
        }
        acc
    }
}

/// Wigner-Yanase skew information `-1/2 tr([sqrt(s), K]^2)`.
pub fn skew_information(sigma: &DensityMatrix, k: &ComplexMatrix) -> Result<f64> {
    check_observable(sigma, k)?;
    Ok(Spectrum::of(sigma.matrix()).skew(k))
}

/// Quantum Fisher information `1/4 tr(s L^2)` with `1/2 (L s + s L) = i [s, H]`.
pub fn quantum_fisher_information(sigma: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    check_observable(sigma, h)?;
    Ok(Spectrum::of(sigma.matrix()).qfi(h))
}

/// `tr(s K^2) - tr(s K)^2`.
pub fn variance(sigma: &DensityMatrix, k: &ComplexMatrix) -> Result<f64> {
    check_observable(sigma, k)?;
    let sk = sigma.matrix() * k;
    let mean = sk.trace().re;
    Ok((&sk * k).trace().re - mean * mean)
}

fn check_basis(rho: &DensityMatrix, basis: &VonNeumannMeasurement) -> Result<()> {
    if basis.dim() != rho.dim() {
        return Err(dim_mismatch(basis.dim(), rho.dim()));
    }
    Ok(())
}

/// Sum of off-diagonal magnitudes of `rho` written in `basis`.
pub fn coherence_l1(rho: &DensityMatrix, basis: &VonNeumannMeasurement) -> Result<MeasureValue> {
    check_basis(rho, basis)?;
    let m = basis.to_basis(rho.matrix())?;
    let d = m.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    Ok(MeasureValue::new(MeasureKind::L1, acc, basis.tag()))
}

/// `S(dephased rho) - S(rho)` in bits.
pub fn coherence_rel_entropy(rho: &DensityMatrix, basis: &VonNeumannMeasurement) -> Result<MeasureValue> {
    check_basis(rho, basis)?;
    let diag = dephase(rho, basis)?;
    let v = von_neumann_entropy(&diag) - von_neumann_entropy(rho);
    Ok(MeasureValue::new(MeasureKind::RelEntropy, v, basis.tag()))
}

/// `sum_i I(rho, Pi_i)`.
pub fn coherence_skew(rho: &DensityMatrix, basis: &VonNeumannMeasurement) -> Result<MeasureValue> {
    check_basis(rho, basis)?;
    let sp = Spectrum::of(rho.matrix());
    let v = basis.projectors().iter().map(|p| sp.skew(p)).sum();
    Ok(MeasureValue::new(MeasureKind::Skew, v, basis.tag()))
}

/// `sum_i F(rho, Pi_i)`.
pub fn coherence_qfi(rho: &DensityMatrix, basis: &VonNeumannMeasurement) -> Result<MeasureValue> {
    check_basis(rho, basis)?;
    let sp = Spectrum::of(rho.matrix());
    let v = basis.projectors().iter().map(|p| sp.qfi(p)).sum();
    Ok(MeasureValue::new(MeasureKind::Qfi, v, basis.tag()))
}

/// `C_I^a = sum_i I(rho_ab, Pi_i^a (x) I_b)`.
pub fn partial_coherence_skew(rho: &BipartiteState, lueders: &LuedersMeasurement) -> Result<MeasureValue> {
    lueders.check_dim(rho.matrix().dim())?;
    let sp = Spectrum::of(rho.matrix());
    let v = lueders.projectors().iter().map(|p| sp.skew(p)).sum();
    Ok(MeasureValue::new(MeasureKind::PartialSkew, v, lueders.tag()))
}

/// `sum_i F(rho_ab, Pi_i^a (x) I_b)`.
pub fn partial_coherence_qfi(rho: &BipartiteState, lueders: &LuedersMeasurement) -> Result<MeasureValue> {
    lueders.check_dim(rho.matrix().dim())?;
    let sp = Spectrum::of(rho.matrix());
    let v = lueders.projectors().iter().map(|p| sp.qfi(p)).sum();
    Ok(MeasureValue::new(MeasureKind::PartialQfi, v, lueders.tag()))
}

/// Evaluates one measure by kind. Single-system measures on a bipartite
/// state use the basis `a_basis (x) computational_b`.
pub fn evaluate(kind: MeasureKind, rho: &BipartiteState, a_basis: &VonNeumannMeasurement) -> Result<MeasureValue> {
    let lueders = a_basis.lueders_extend(rho.d_b());
    if kind.is_partial() {
        return match kind {
            MeasureKind::PartialSkew => partial_coherence_skew(rho, &lueders),
            _ => partial_coherence_qfi(rho, &lueders),
        };
    }
    let full = if rho.d_b() == 1 {
        a_basis.clone()
    } else {
        let u = crate::linalg::kron(a_basis.basis(), &ComplexMatrix::identity(rho.d_b()));
        VonNeumannMeasurement::from_unitary(&u)?.with_label(format!("{}(x)computational", a_basis.label()))
    };
    let st = rho.state();
    match kind {
        MeasureKind::L1 => coherence_l1(st, &full),
        MeasureKind::RelEntropy => coherence_rel_entropy(st, &full),
        MeasureKind::Skew => coherence_skew(st, &full),
        _ => coherence_qfi(st, &full),
    }
}
