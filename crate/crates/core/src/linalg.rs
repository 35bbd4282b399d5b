//! Dense complex matrices and the handful of decompositions the measures need.
//!
//! Bipartite operators use the a-major convention throughout the crate: the
//! basis vector `|i>_a |j>_b` sits at flat index `i * d_b + j`, which is exactly
//! what [`kron`] produces.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Error, Result};
use crate::rng;

pub type C64 = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_CLIP_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(dim_mismatch(rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Self::new(r, cols, rows.iter().flatten().copied().collect())
    }

    /// Real-valued convenience constructor used heavily in tests.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let d = values.len();
        Self::from_fn(d, d, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map(Vec::len).unwrap_or(0);
        if columns.iter().any(|col| col.len() != rows) {
            return Err(Error::InvalidArgument("columns of unequal length".into()));
        }
        let m = Self::from_fn(rows, cols, |i, j| columns[j][i]);
        Self::new(rows, cols, m.data)
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let d = v.len();
        Self::from_fn(d, d, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_vec(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|` over entries; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut r = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// `max |U^dagger U - I|` over entries.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.dagger() * self)
            .sub_checked(&Self::identity(self.rows))
            .map(|m| m.max_abs())
            .unwrap_or(f64::INFINITY)
    }

    pub fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        self.ensure_square()?;
        let residual = self.hermiticity_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual });
        }
        Ok(())
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        self.ensure_square()?;
        let residual = self.unitarity_residual();
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        Ok(())
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(dim_mismatch(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(())
    }

    pub fn add_checked(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub_checked(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn mul_checked(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(dim_mismatch(
                format!("inner dimension {}", self.cols),
                format!("{}", other.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `A X A^dagger`.
    pub fn conjugate_by(&self, a: &Self) -> Result<Self> {
        a.mul_checked(self)?.mul_checked(&a.dagger())
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(dim_mismatch(
                format!("{}x{}", other.cols, other.rows),
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        let mut acc = c(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        Ok(acc)
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch; use the *_checked methods for
// fallible arithmetic on untrusted shapes.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.mul_checked(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_checked(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.sub_checked(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// `V f(diag(lambda)) V^dagger`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let d = v.rows();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(d, d, |i, j| {
            (0..d).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|l| l)
    }

    /// Matrix elements `<j|K|k>` of `op` in the eigenbasis.
    pub fn in_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.eigenvectors;
        &(&v.dagger() * op) * v
    }
}

/// Hermitian eigendecomposition with validation of the input.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    m.ensure_hermitian(HERMITIAN_TOL)?;
    Ok(eigh(m))
}

/// Eigendecomposition of the Hermitian part of `m`, no validation.
pub(crate) fn eigh(m: &ComplexMatrix) -> SpectralDecomposition {
    let d = m.dim();
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-10, 0)` are treated as round-off and clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(m)?;
    psd_sqrt_from(&spec)
}

pub(crate) fn psd_sqrt_from(spec: &SpectralDecomposition) -> Result<ComplexMatrix> {
    if let Some(&min) = spec.eigenvalues.first() {
        if min < -PSD_CLIP_TOL {
            return Err(Error::NotPsd { eigenvalue: min });
        }
    }
    Ok(spec.map_eigenvalues(|l| l.max(0.0).sqrt()))
}

/// Kronecker product `A (x) B`, a-major.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

pub fn partial_trace(m: &ComplexMatrix, d_a: usize, d_b: usize, keep: Party) -> Result<ComplexMatrix> {
    let n = d_a * d_b;
    if m.rows() != n || m.cols() != n {
        return Err(dim_mismatch(
            format!("{n}x{n} for dims ({d_a},{d_b})"),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(match keep {
        Party::A => ComplexMatrix::from_fn(d_a, d_a, |i, k| {
            (0..d_b).map(|j| m[(i * d_b + j, k * d_b + j)]).sum()
        }),
        Party::B => ComplexMatrix::from_fn(d_b, d_b, |j, l| {
            (0..d_a).map(|i| m[(i * d_b + j, i * d_b + l)]).sum()
        }),
    })
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.ensure_square()?;
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(dim_mismatch(
            format!("{}x{}", a.rows(), a.cols()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    (a * b).sub_checked(&(b * a))
}

/// Haar-random unitary, deterministic per seed.
pub fn random_haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    haar_unitary(&mut rng::seeded(seed), d)
}

/// Haar unitary from QR of a complex Ginibre matrix, with the diagonal of R
/// phase-normalized so the distribution is exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| rng::complex_normal(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = ComplexMatrix::from_nalgebra(&q);
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// `exp(A)` for anti-Hermitian `A`, computed as `V exp(-i lambda) V^dagger`
/// with `A = -i H`.
pub fn expm_anti_hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    let h = a.scale(c(0.0, 1.0));
    let spec = eigh(&h);
    let v = &spec.eigenvectors;
    let d = v.rows();
    let phases: Vec<C64> = spec
        .eigenvalues
        .iter()
        .map(|&l| C64::from_polar(1.0, -l))
        .collect();
    ComplexMatrix::from_fn(d, d, |i, j| {
        (0..d).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()
    })
}

/// Standard Pauli matrices `[X, Y, Z]`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let z0 = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        ComplexMatrix::new(2, 2, vec![z0, one, one, z0]).unwrap(),
        ComplexMatrix::new(2, 2, vec![z0, -i, i, z0]).unwrap(),
        ComplexMatrix::new(2, 2, vec![one, z0, z0, -one]).unwrap(),
    ]
}

pub fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(&[&[s, s], &[s, -s]]).unwrap()
}

/// Cyclic shift `|j> -> |j+1 mod d>`.
pub fn shift(d: usize, power: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + power) % d {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Random Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| rng::complex_normal(rng));
    g.hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).frobenius_norm()
    }

    #[test]
    fn eig_of_diagonal() {
        let m = ComplexMatrix::diag_real(&[0.25, 0.75]);
        let s = hermitian_eig(&m).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 0.75, epsilon = 1e-14);
        for k in 0..2 {
            assert_abs_diff_eq!(s.eigenvectors[(k, k)].norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eig_of_pauli_x() {
        let s = hermitian_eig(&pauli()[0]).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_of_identity() {
        let s = hermitian_eig(&ComplexMatrix::identity(3)).unwrap();
        for l in &s.eigenvalues {
            assert_abs_diff_eq!(*l, 1.0, epsilon = 1e-14);
        }
        assert!(s.eigenvectors.unitarity_residual() < 1e-12);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare { .. })));
        let m = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        match hermitian_eig(&m) {
            Err(Error::NotHermitian { residual }) => assert_abs_diff_eq!(residual, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sqrt_examples() {
        // Round-off eigenvalues near zero get square-rooted, so ~1e-8 is the floor.
        let p = ComplexMatrix::outer(&[c(0.6, 0.0), c(0.0, 0.8)]);
        assert!(dist(&psd_sqrt(&p).unwrap(), &p) < 1e-7);

        let r = psd_sqrt(&ComplexMatrix::diag_real(&[0.25, 0.75])).unwrap();
        let want = ComplexMatrix::diag_real(&[0.5, 0.75f64.sqrt()]);
        assert!(dist(&r, &want) < 1e-12);

        let mm = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        let want = ComplexMatrix::identity(3).scale_real(1.0 / 3.0f64.sqrt());
        assert!(dist(&psd_sqrt(&mm).unwrap(), &want) < 1e-12);
    }

    #[test]
    fn sqrt_clips_roundoff_and_rejects_negative() {
        let tiny = ComplexMatrix::diag_real(&[-5e-11, 1.0]);
        let r = psd_sqrt(&tiny).unwrap();
        assert_eq!(r[(0, 0)].re, 0.0);
        let bad = ComplexMatrix::diag_real(&[-1e-3, 1.0]);
        match psd_sqrt(&bad) {
            Err(Error::NotPsd { eigenvalue }) => assert_abs_diff_eq!(eigenvalue, -1e-3, epsilon = 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let z = &pauli()[2];
        assert_eq!(kron(z, z), ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));
        let k = kron(&i2, &ComplexMatrix::identity(3));
        assert_eq!((k.rows(), k.cols()), (6, 6));
    }

    #[test]
    fn partial_trace_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(dist(&partial_trace(&bell, 2, 2, Party::A).unwrap(), &half) < 1e-15);
        assert!(dist(&partial_trace(&bell, 2, 2, Party::B).unwrap(), &half) < 1e-15);

        let mm = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(dist(&partial_trace(&mm, 2, 2, Party::B).unwrap(), &half) < 1e-15);

        let ra = ComplexMatrix::from_real(&[&[0.3, 0.1], &[0.1, 0.7]]).unwrap();
        let rb = ComplexMatrix::diag_real(&[0.2, 0.5, 0.3]);
        let pt = partial_trace(&kron(&ra, &rb), 2, 3, Party::A).unwrap();
        assert!(dist(&pt, &ra) < 1e-15);

        assert!(partial_trace(&mm, 2, 3, Party::A).is_err());
    }

    #[test]
    fn commutator_examples() {
        let [x, y, z] = pauli();
        let a = ComplexMatrix::from_real(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(commutator(&a, &a).unwrap().max_abs(), 0.0);
        let xy = commutator(&x, &y).unwrap();
        assert!(dist(&xy, &z.scale(c(0.0, 2.0))) < 1e-15);
        let d1 = ComplexMatrix::diag_real(&[1.0, 2.0]);
        let d2 = ComplexMatrix::diag_real(&[3.0, -1.0]);
        assert_eq!(commutator(&d1, &d2).unwrap().max_abs(), 0.0);
        assert!(commutator(&d1, &ComplexMatrix::identity(3)).is_err());
        assert_eq!(commutator(&x, &a).unwrap(), -&commutator(&a, &x).unwrap());
    }

    #[test]
    fn haar_unitary_basics() {
        let u1 = random_haar_unitary(1, 9);
        assert_abs_diff_eq!(u1[(0, 0)].norm(), 1.0, epsilon = 1e-14);
        assert_eq!(random_haar_unitary(4, 3), random_haar_unitary(4, 3));
        assert!(random_haar_unitary(5, 11).unitarity_residual() < 1e-10);
    }

    #[test]
    fn haar_first_moment() {
        // E|U_00|^2 = 1/d for Haar unitaries.
        let mut rng = rng::seeded(2024);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| haar_unitary(&mut rng, 2)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert_abs_diff_eq!(mean, 0.5, epsilon = 0.02);
    }

    #[test]
    fn expm_is_unitary_and_matches_series() {
        let mut rng = rng::seeded(5);
        let h = random_hermitian(&mut rng, 3).scale_real(0.3);
        let a = h.scale(c(0.0, -1.0));
        let u = expm_anti_hermitian(&a);
        assert!(u.unitarity_residual() < 1e-12);
        // Taylor series oracle.
        let mut term = ComplexMatrix::identity(3);
        let mut sum = ComplexMatrix::identity(3);
        for k in 1..30 {
            term = (&term * &a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        assert!(dist(&u, &sum) < 1e-12);
    }
}
