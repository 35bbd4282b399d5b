//! Kraus channels, incoherence classifiers and channel samplers.
//!
//! The samplers only reach guaranteed-valid subfamilies:
//!
//! - incoherent: mixtures `sqrt(p_k) P_k D_k` of permutation-phase unitaries,
//!   plus (for counterexample searches) damping-type maps composed with them;
//! - partial incoherent: `sum_i |pi_l(i)><i| (x) B_{l,i}` where for every `i`
//!   the blocks `{B_{l,i}}_l` form a Kraus family on party b.
//!
//! Neither covers the full operation sets, and suite reports say so.

use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{c, haar_unitary, kron, ComplexMatrix, C64, UNITARY_TOL};
use crate::measurements::{LuedersMeasurement, VonNeumannMeasurement};
use crate::rng;
use crate::states::{dephase_matrix, BipartiteState, DensityMatrix};

pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Selective outcomes with probability below this are dropped.
pub const OUTCOME_CUTOFF: f64 = 1e-12;

/// CPTP map `rho -> sum_k K_k rho K_k^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

/// `||sum_k K_k^dagger K_k - I||_F`.
pub fn completeness_residual(ops: &[ComplexMatrix]) -> f64 {
    let Some(first) = ops.first() else {
        return f64::INFINITY;
    };
    let d = first.cols();
    let sum = ops
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &(&k.dagger() * k));
    (&sum - &ComplexMatrix::identity(d)).frobenius_norm()
}

pub fn channel_from_kraus(ops: Vec<ComplexMatrix>, tol: f64) -> Result<KrausChannel> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidArgument("a channel needs at least one Kraus operator".into()))?;
    let (dim_out, dim_in) = (first.rows(), first.cols());
    if let Some(bad) = ops.iter().find(|k| k.rows() != dim_out || k.cols() != dim_in) {
        return Err(dim_mismatch(
            format!("{dim_out}x{dim_in}"),
            format!("{}x{}", bad.rows(), bad.cols()),
        ));
    }
    let residual = completeness_residual(&ops);
    if residual > tol {
        return Err(Error::Incomplete { residual });
    }
    Ok(KrausChannel {
        dim_in,
        dim_out,
        kraus: ops,
    })
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        channel_from_kraus(ops, COMPLETENESS_TOL)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        u.ensure_unitary(UNITARY_TOL)?;
        Self::new(vec![u.clone()])
    }

    /// Projective dephasing channel `{P_i}` of a measurement.
    pub fn dephasing(basis: &VonNeumannMeasurement) -> Self {
        Self {
            dim_in: basis.dim(),
            dim_out: basis.dim(),
            kraus: basis.projectors(),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(dim_mismatch(self.dim_in, x.rows()));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &x.conjugate_by(k)?;
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.matrix())?))
    }

    /// Applies a channel on the full bipartite space, keeping the split.
    pub fn apply_bipartite(&self, rho: &BipartiteState) -> Result<BipartiteState> {
        if self.dim_out != self.dim_in {
            return Err(dim_mismatch(self.dim_in, self.dim_out));
        }
        rho.with_state(self.apply(rho.state())?)
    }

    /// Outcomes `(p_l, K_l rho K_l^dagger / p_l)`, dropping `p_l < 1e-12`.
    pub fn apply_selective(&self, rho: &DensityMatrix) -> Result<Vec<(f64, DensityMatrix)>> {
        if rho.dim() != self.dim_in {
            return Err(dim_mismatch(self.dim_in, rho.dim()));
        }
        let mut out = Vec::new();
        for k in &self.kraus {
            let m = rho.matrix().conjugate_by(k)?;
            let p = m.trace().re;
            if p < OUTCOME_CUTOFF {
                continue;
            }
            out.push((p, DensityMatrix::from_trusted(m.scale_real(1.0 / p))));
        }
        Ok(out)
    }
}

/// Kraus set `{K_o K_i}` of `outer . inner`.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    if inner.dim_out != outer.dim_in {
        return Err(dim_mismatch(outer.dim_in, inner.dim_out));
    }
    let mut ops = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
    for ko in &outer.kraus {
        for ki in &inner.kraus {
            ops.push(ko * ki);
        }
    }
    Ok(KrausChannel {
        dim_in: inner.dim_in,
        dim_out: outer.dim_out,
        kraus: ops,
    })
}

/// Every Kraus operator, written in `basis`, has at most one entry of
/// modulus above `tol` per column.
pub fn is_incoherent_channel(ch: &KrausChannel, basis: &VonNeumannMeasurement, tol: f64) -> bool {
    if ch.dim_in != basis.dim() || ch.dim_out != basis.dim() {
        return false;
    }
    ch.kraus.iter().all(|k| {
        let kb = basis.to_basis(k).expect("dims checked");
        (0..kb.cols()).all(|j| (0..kb.rows()).filter(|&i| kb[(i, j)].norm() > tol).count() <= 1)
    })
}

/// Hermitian basis of `d x d` matrices: `E_jj`, `E_jk + E_kj`, `i(E_jk - E_kj)`.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(j, j)] = c(1.0, 0.0);
        out.push(e);
        for k in (j + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = c(1.0, 0.0);
            s[(k, j)] = c(1.0, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = c(0.0, 1.0);
            a[(k, j)] = c(0.0, -1.0);
            out.push(a);
        }
    }
    out
}

/// Checks that every Kraus operator maps each element of a Hermitian basis of
/// the block-diagonal subspace `{Pi_i^a (x) B}` back into that subspace.
pub fn is_partial_incoherent_channel(ch: &KrausChannel, lueders: &LuedersMeasurement, tol: f64) -> bool {
    partial_incoherence_residual(ch, lueders).is_ok_and(|r| r <= tol)
}

/// Largest `||Pi_L(K X K^dagger) - K X K^dagger||_F` over the operator basis.
pub fn partial_incoherence_residual(ch: &KrausChannel, lueders: &LuedersMeasurement) -> Result<f64> {
    lueders.check_dim(ch.dim_in)?;
    lueders.check_dim(ch.dim_out)?;
    let local = lueders.local();
    let b_basis = hermitian_basis(lueders.d_b());
    let mut worst = 0.0f64;
    for i in 0..lueders.d_a() {
        let p = local.projector(i);
        for b in &b_basis {
            let x = kron(&p, b);
            for k in &ch.kraus {
                let y = x.conjugate_by(k)?;
                let r = (&dephase_matrix(&y, lueders) - &y).frobenius_norm();
                worst = worst.max(r);
            }
        }
    }
    Ok(worst)
}

/// `sum_i Pi_i^a (x) V_i` as a single-Kraus channel.
pub fn controlled_unitary(a_basis: &VonNeumannMeasurement, v: &[ComplexMatrix]) -> Result<KrausChannel> {
    if v.len() != a_basis.dim() {
        return Err(dim_mismatch(
            format!("{} controlled unitaries", a_basis.dim()),
            v.len(),
        ));
    }
    let d_b = v[0].dim();
    let d = a_basis.dim() * d_b;
    let mut u = ComplexMatrix::zeros(d, d);
    for (i, vi) in v.iter().enumerate() {
        if vi.dim() != d_b {
            return Err(dim_mismatch(d_b, vi.dim()));
        }
        vi.ensure_unitary(UNITARY_TOL)?;
        u = &u + &kron(&a_basis.projector(i), vi);
    }
    KrausChannel::new(vec![u])
}

/// Controlled cyclic shift `|i>|j> -> |i>|j + i mod d_b>` in the computational basis.
pub fn generalized_cnot(d_a: usize, d_b: usize) -> KrausChannel {
    let shifts: Vec<ComplexMatrix> = (0..d_a).map(|i| crate::linalg::shift(d_b, i)).collect();
    controlled_unitary(&VonNeumannMeasurement::computational(d_a), &shifts)
        .expect("permutation blocks are unitary")
}

fn permutation_matrix(perm: &[usize]) -> ComplexMatrix {
    let d = perm.len();
    ComplexMatrix::from_fn(d, d, |i, j| if perm[j] == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn random_phases<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let phases: Vec<C64> = (0..d)
        .map(|_| C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
        .collect();
    ComplexMatrix::from_fn(d, d, |i, j| if i == j { phases[i] } else { c(0.0, 0.0) })
}

pub fn incoherent_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, n_kraus: usize) -> KrausChannel {
    let n = n_kraus.max(1);
    let p = rng::simplex(rng, n);
    let kraus = p
        .iter()
        .map(|&pk| {
            let perm = permutation_matrix(&rng::permutation(rng, d));
            (&perm * &random_phases(rng, d)).scale_real(pk.sqrt())
        })
        .collect();
    KrausChannel {
        dim_in: d,
        dim_out: d,
        kraus,
    }
}

/// Mixture of permutation-phase unitaries `{sqrt(p_k) P_k D_k}`.
pub fn random_incoherent_channel(d: usize, n_kraus: usize, seed: u64) -> KrausChannel {
    incoherent_channel(&mut rng::seeded(seed), d, n_kraus)
}

/// Amplitude damping `|b> -> |a>` with strength `gamma` inside a `d`-level system.
pub fn level_damping(d: usize, from: usize, to: usize, gamma: f64) -> KrausChannel {
    let mut k0 = ComplexMatrix::identity(d);
    k0[(from, from)] = c((1.0 - gamma).sqrt(), 0.0);
    let mut k1 = ComplexMatrix::zeros(d, d);
    k1[(to, from)] = c(gamma.sqrt(), 0.0);
    KrausChannel {
        dim_in: d,
        dim_out: d,
        kraus: vec![k0, k1],
    }
}

/// Incoherent channel that is not a mixture of unitaries: random damping
/// steps between level pairs interleaved with permutation-phase mixtures.
pub fn damping_incoherent_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, steps: usize) -> KrausChannel {
    let mut ch = incoherent_channel(rng, d, 1);
    if d < 2 {
        return ch;
    }
    for _ in 0..steps {
        let from = rng.random_range(0..d);
        let mut to = rng.random_range(0..d - 1);
        if to >= from {
            to += 1;
        }
        let damp = level_damping(d, from, to, rng.random::<f64>());
        let n = rng.random_range(1..=2);
        let mix = incoherent_channel(rng, d, n);
        ch = compose(&mix, &compose(&damp, &ch).expect("dims")).expect("dims");
    }
    ch
}

/// Block-form partial incoherent channel in the basis of `a_basis`:
/// `K_l = sum_i |u_{perm_l(i)}><u_i| (x) blocks[l][i]`.
///
/// For each `i`, `{blocks[l][i]}_l` must be a Kraus family on party b.
pub fn partial_incoherent_from_blocks(
    a_basis: &VonNeumannMeasurement,
    perms: &[Vec<usize>],
    blocks: &[Vec<ComplexMatrix>],
) -> Result<KrausChannel> {
    let d_a = a_basis.dim();
    if perms.len() != blocks.len() || perms.is_empty() {
        return Err(Error::InvalidArgument(
            "one permutation per Kraus operator required".into(),
        ));
    }
    let d_b = blocks[0]
        .first()
        .map(ComplexMatrix::dim)
        .ok_or_else(|| Error::InvalidArgument("empty block list".into()))?;
    let vecs: Vec<Vec<C64>> = (0..d_a).map(|i| a_basis.vector(i)).collect();
    let mut ops = Vec::with_capacity(perms.len());
    for (perm, bl) in perms.iter().zip(blocks) {
        if perm.len() != d_a || bl.len() != d_a {
            return Err(dim_mismatch(d_a, perm.len().min(bl.len())));
        }
        let mut k = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
        for i in 0..d_a {
            let ket = &vecs[perm[i]];
            let bra = &vecs[i];
            let a_part = ComplexMatrix::from_fn(d_a, d_a, |r, s| ket[r] * bra[s].conj());
            k = k.add_checked(&kron(&a_part, &bl[i]))?;
        }
        ops.push(k);
    }
    KrausChannel::new(ops)
}

/// Random Kraus family `{B_l}` with `n` operators on dimension `d`, cut from
/// a Haar isometry.
fn random_kraus_family<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> Vec<ComplexMatrix> {
    let u = haar_unitary(rng, n * d);
    (0..n)
        .map(|l| ComplexMatrix::from_fn(d, d, |r, s| u[(l * d + r, s)]))
        .collect()
}

pub fn partial_incoherent_channel<R: Rng + ?Sized>(
    rng: &mut R,
    a_basis: &VonNeumannMeasurement,
    d_b: usize,
) -> KrausChannel {
    let d_a = a_basis.dim();
    let n = rng.random_range(1..=3usize);
    let families: Vec<Vec<ComplexMatrix>> = (0..d_a).map(|_| random_kraus_family(rng, d_b, n)).collect();
    let perms: Vec<Vec<usize>> = (0..n).map(|_| rng::permutation(rng, d_a)).collect();
    let blocks: Vec<Vec<ComplexMatrix>> = (0..n)
        .map(|l| (0..d_a).map(|i| families[i][l].clone()).collect())
        .collect();
    partial_incoherent_from_blocks(a_basis, &perms, &blocks).expect("isometry blocks are complete")
}

/// Random partial incoherent channel w.r.t. the computational Lüders measurement.
pub fn random_partial_incoherent_channel(d_a: usize, d_b: usize, seed: u64) -> KrausChannel {
    partial_incoherent_channel(
        &mut rng::seeded(seed),
        &VonNeumannMeasurement::computational(d_a),
        d_b,
    )
}
