//! Validated density matrices, bipartite structure and structural classifiers.

use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{c, eigh, kron, partial_trace, ComplexMatrix, Party, C64};
use crate::measurements::{LuedersMeasurement, VonNeumannMeasurement};
use crate::rng;

pub const STATE_TOL: f64 = 1e-10;

/// Anything that induces a complete family of orthogonal projectors.
pub trait ProjectiveMeasurement {
    fn dim(&self) -> usize;
    fn projectors(&self) -> Vec<ComplexMatrix>;
}

impl ProjectiveMeasurement for VonNeumannMeasurement {
    fn dim(&self) -> usize {
        VonNeumannMeasurement::dim(self)
    }
    fn projectors(&self) -> Vec<ComplexMatrix> {
        VonNeumannMeasurement::projectors(self)
    }
}

impl ProjectiveMeasurement for LuedersMeasurement {
    fn dim(&self) -> usize {
        LuedersMeasurement::dim(self)
    }
    fn projectors(&self) -> Vec<ComplexMatrix> {
        LuedersMeasurement::projectors(self)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates with the default tolerance `1e-10`.
    pub fn new(raw: ComplexMatrix) -> Result<Self> {
        Self::with_tol(raw, STATE_TOL)
    }

    /// Validates Hermiticity, trace and positivity; the matrix is stored as given.
    pub fn with_tol(raw: ComplexMatrix, tol: f64) -> Result<Self> {
        raw.ensure_hermitian(tol)?;
        let tr = raw.trace();
        let residual = (tr - c(1.0, 0.0)).norm();
        if residual > tol {
            return Err(Error::Trace { residual });
        }
        let min = eigh(&raw).eigenvalues[0];
        if min < -tol {
            return Err(Error::NotPsd { eigenvalue: min });
        }
        Ok(Self { matrix: raw })
    }

    /// Wraps a matrix produced by a trace- and positivity-preserving
    /// computation. Only the Hermitian part is kept.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self {
            matrix: m.hermitian_part(),
        }
    }

    /// `|v><v|` with `v` normalized.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let u: Vec<C64> = v.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&u),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    /// `|0><0|` on dimension `d`.
    pub fn ground(d: usize) -> Self {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(0, 0)] = c(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).expect("square").re
    }

    /// Eigenvalues, ascending, with round-off negatives clipped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.matrix)
            .eigenvalues
            .into_iter()
            .map(|l| l.max(0.0))
            .collect()
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        let m = self
            .matrix
            .scale_real(w)
            .add_checked(&other.matrix.scale_real(1.0 - w))?;
        Ok(Self::from_trusted(m))
    }

    /// `U rho U^dagger` for unitary `U`.
    pub fn unitary_conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self::from_trusted(self.matrix.conjugate_by(u)?))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }
}

/// Density matrix on `C^{d_a} (x) C^{d_b}`, a-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    d_a: usize,
    d_b: usize,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_a * d_b != state.dim() {
            return Err(dim_mismatch(
                format!("d_a * d_b = {}", state.dim()),
                format!("{d_a} x {d_b}"),
            ));
        }
        Ok(Self { state, d_a, d_b })
    }

    pub fn product(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Self {
        Self {
            state: rho_a.tensor(rho_b),
            d_a: rho_a.dim(),
            d_b: rho_b.dim(),
        }
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    /// Party a is trivial; measures on party a are then identically zero.
    pub fn is_degenerate(&self) -> bool {
        self.d_a < 2
    }

    pub fn reduced_a(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(
            partial_trace(self.matrix(), self.d_a, self.d_b, Party::A).expect("dims checked"),
        )
    }

    pub fn reduced_b(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(
            partial_trace(self.matrix(), self.d_a, self.d_b, Party::B).expect("dims checked"),
        )
    }

    /// Applies `U_a (x) U_b`.
    pub fn local_unitary(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<Self> {
        if u_a.dim() != self.d_a || u_b.dim() != self.d_b {
            return Err(dim_mismatch(
                format!("{} x {}", self.d_a, self.d_b),
                format!("{} x {}", u_a.dim(), u_b.dim()),
            ));
        }
        let st = self.state.unitary_conjugate(&kron(u_a, u_b))?;
        Ok(Self { state: st, ..*self })
    }

    pub fn with_state(&self, state: DensityMatrix) -> Result<Self> {
        Self::new(state, self.d_a, self.d_b)
    }
}

/// `|psi><psi|` from an unnormalized amplitude vector.
pub fn pure_from_vector(v: &[C64]) -> Result<DensityMatrix> {
    DensityMatrix::pure(v)
}

pub fn density_from_matrix(raw: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    raw.ensure_square()?;
    DensityMatrix::with_tol(raw, tol)
}

pub fn haar_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let v: Vec<C64> = (0..d).map(|_| rng::complex_normal(rng)).collect();
    DensityMatrix::pure(&v).expect("Gaussian vector is nonzero almost surely")
}

/// Haar-random pure state, deterministic per seed.
pub fn random_haar_pure(d: usize, seed: u64) -> DensityMatrix {
    haar_pure(&mut rng::seeded(seed), d)
}

/// Induced-measure mixed state: trace out a `k`-dimensional environment of a
/// Haar pure state on `d * k`.
pub fn mixed_induced<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> DensityMatrix {
    let psi = haar_pure(rng, d * k);
    DensityMatrix::from_trusted(
        partial_trace(psi.matrix(), d, k, Party::A).expect("dims by construction"),
    )
}

pub fn random_mixed_induced(d: usize, k: usize, seed: u64) -> DensityMatrix {
    mixed_induced(&mut rng::seeded(seed), d, k)
}

/// `sum_i P_i rho P_i`.
pub fn dephase<M: ProjectiveMeasurement + ?Sized>(rho: &DensityMatrix, m: &M) -> Result<DensityMatrix> {
    if m.dim() != rho.dim() {
        return Err(dim_mismatch(m.dim(), rho.dim()));
    }
    Ok(DensityMatrix::from_trusted(dephase_matrix(rho.matrix(), m)))
}

pub(crate) fn dephase_matrix<M: ProjectiveMeasurement + ?Sized>(x: &ComplexMatrix, m: &M) -> ComplexMatrix {
    let d = x.dim();
    m.projectors()
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, p| &acc + &(&(p * x) * p))
}

/// `rho_a (x) |0><0|_b`.
pub fn attach_ancilla(rho_a: &DensityMatrix, d_b: usize) -> Result<BipartiteState> {
    if d_b == 0 {
        return Err(Error::InvalidArgument("ancilla dimension must be >= 1".into()));
    }
    Ok(BipartiteState::product(rho_a, &DensityMatrix::ground(d_b)))
}

/// Checks a probability vector: renormalizes when within `1e-10` of unit sum.
pub(crate) fn normalize_probabilities(p: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = p.iter().sum();
    let residual = (total - 1.0).abs();
    if residual > STATE_TOL || p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::Probability { residual });
    }
    Ok(p.iter().map(|x| x / total).collect())
}

/// `sum_n p_n |phi_n><phi_n| (x) sigma_n`, zero geometric discord by construction.
pub fn classical_quantum_state(
    p: &[f64],
    a_basis: &VonNeumannMeasurement,
    b_states: &[DensityMatrix],
) -> Result<BipartiteState> {
    if p.len() != b_states.len() || p.is_empty() || p.len() > a_basis.dim() {
        return Err(Error::InvalidArgument(format!(
            "need 1..={} weights matching {} b-states, got {}",
            a_basis.dim(),
            b_states.len(),
            p.len()
        )));
    }
    let p = normalize_probabilities(p)?;
    let d_b = b_states[0].dim();
    if let Some(bad) = b_states.iter().find(|s| s.dim() != d_b) {
        return Err(dim_mismatch(d_b, bad.dim()));
    }
    let d_a = a_basis.dim();
    let mut acc = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
    for (n, (w, sigma)) in p.iter().zip(b_states).enumerate() {
        acc = &acc + &kron(&a_basis.projector(n), sigma.matrix()).scale_real(*w);
    }
    BipartiteState::new(DensityMatrix::from_trusted(acc), d_a, d_b)
}

/// True iff `||Pi_L(rho) - rho||_F <= tol`.
pub fn is_partial_incoherent(rho: &BipartiteState, lueders: &LuedersMeasurement, tol: f64) -> bool {
    if lueders.check_dim(rho.matrix().dim()).is_err() {
        return false;
    }
    let deph = dephase_matrix(rho.matrix(), lueders);
    (&deph - rho.matrix()).frobenius_norm() <= tol
}

/// True iff `rho` is diagonal in `basis` within `tol` (Frobenius).
pub fn is_incoherent(rho: &DensityMatrix, basis: &VonNeumannMeasurement, tol: f64) -> bool {
    if basis.dim() != rho.dim() {
        return false;
    }
    let deph = dephase_matrix(rho.matrix(), basis);
    (&deph - rho.matrix()).frobenius_norm() <= tol
}
