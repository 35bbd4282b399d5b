//! Rank-one von Neumann measurements and their Lüders extensions.

use crate::error::{Error, Result};
use crate::linalg::{c, expm_anti_hermitian, kron, ComplexMatrix, C64, UNITARY_TOL};

/// Orthonormal basis `{|i>}`; projectors `|i><i|` are derived on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct VonNeumannMeasurement {
    basis: ComplexMatrix,
    label: String,
}

impl VonNeumannMeasurement {
    pub fn computational(d: usize) -> Self {
        Self {
            basis: ComplexMatrix::identity(d),
            label: "computational".into(),
        }
    }

    /// Basis vectors are the columns of `u`.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        u.ensure_unitary(UNITARY_TOL)?;
        Ok(Self {
            basis: u.clone(),
            label: "unitary".into(),
        })
    }

    /// `{cos(t/2)|0> + e^{i p} sin(t/2)|1>, orthogonal complement}`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        Self {
            basis: qubit_unitary(theta, phi),
            label: format!("qubit(theta={theta:.6},phi={phi:.6})"),
        }
    }

    /// Basis `exp(A(x))` where `A(x)` is the anti-Hermitian matrix built from
    /// `d^2` real parameters (see [`anti_hermitian_from_params`]).
    pub fn from_params(d: usize, params: &[f64]) -> Self {
        Self {
            basis: expm_anti_hermitian(&anti_hermitian_from_params(d, params)),
            label: "exp-chart".into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Unitary whose columns are the basis vectors.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.basis.column(i)
    }

    pub fn projector(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector(i))
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.dim()).map(|i| self.projector(i)).collect()
    }

    /// Expresses `op` in this basis: `U^dagger op U`.
    pub fn to_basis(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.basis.dagger().mul_checked(op)?.mul_checked(&self.basis)
    }

    pub fn is_computational(&self) -> bool {
        self.basis == ComplexMatrix::identity(self.dim())
    }

    pub fn lueders_extend(&self, d_b: usize) -> LuedersMeasurement {
        LuedersMeasurement {
            a: self.clone(),
            d_b,
        }
    }

    /// Compact tag for reports.
    pub fn tag(&self) -> String {
        format!("{}(d={})", self.label, self.dim())
    }
}

/// Unitary of the 2-angle qubit chart; columns are the basis vectors.
pub fn qubit_unitary(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    ComplexMatrix::new(2, 2, vec![c(co, 0.0), -e.conj() * s, e * s, c(co, 0.0)]).expect("2x2")
}

/// `A(x)`: diagonal `i x_k` for the first `d` entries, then one `(re, im)`
/// pair per strictly upper-triangular position, mirrored anti-Hermitian.
/// Missing trailing parameters are treated as zero.
pub fn anti_hermitian_from_params(d: usize, params: &[f64]) -> ComplexMatrix {
    let p = |k: usize| params.get(k).copied().unwrap_or(0.0);
    let mut a = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        a[(k, k)] = c(0.0, p(k));
    }
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = c(p(idx), p(idx + 1));
            idx += 2;
            a[(j, k)] = z;
            a[(k, j)] = -z.conj();
        }
    }
    a
}

/// Extension `{Pi_i^a (x) I_b}` of a local measurement on party a.
#[derive(Debug, Clone, PartialEq)]
pub struct LuedersMeasurement {
    a: VonNeumannMeasurement,
    d_b: usize,
}

impl LuedersMeasurement {
    pub fn computational(d_a: usize, d_b: usize) -> Self {
        VonNeumannMeasurement::computational(d_a).lueders_extend(d_b)
    }

    pub fn local(&self) -> &VonNeumannMeasurement {
        &self.a
    }

    pub fn d_a(&self) -> usize {
        self.a.dim()
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a() * self.d_b
    }

    pub fn projector(&self, i: usize) -> ComplexMatrix {
        kron(&self.a.projector(i), &ComplexMatrix::identity(self.d_b))
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.d_a()).map(|i| self.projector(i)).collect()
    }

    pub fn tag(&self) -> String {
        format!("lueders[{}](d_b={})", self.a.tag(), self.d_b)
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} (= {} x {})", self.dim(), self.d_a(), self.d_b),
                got: n.to_string(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard, random_haar_unitary};

    fn check_invariants(projectors: &[ComplexMatrix]) {
        let d = projectors[0].dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (i, p) in projectors.iter().enumerate() {
            assert!(p.hermiticity_residual() < 1e-10);
            for (j, q) in projectors.iter().enumerate() {
                let pq = p * q;
                let want = if i == j { p.clone() } else { ComplexMatrix::zeros(d, d) };
                assert!((&pq - &want).max_abs() < 1e-10);
            }
            sum = &sum + p;
        }
        assert!((&sum - &ComplexMatrix::identity(d)).max_abs() < 1e-10);
    }

    #[test]
    fn computational_projectors() {
        let m = VonNeumannMeasurement::computational(2);
        assert_eq!(m.projector(0), ComplexMatrix::diag_real(&[1.0, 0.0]));
        assert_eq!(m.projector(1), ComplexMatrix::diag_real(&[0.0, 1.0]));
        check_invariants(&m.projectors());
        let m3 = VonNeumannMeasurement::computational(3);
        let sum = m3
            .projectors()
            .iter()
            .fold(ComplexMatrix::zeros(3, 3), |acc, p| &acc + p);
        assert_eq!(sum, ComplexMatrix::identity(3));
    }

    #[test]
    fn from_unitary_examples() {
        let m = VonNeumannMeasurement::from_unitary(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(m.projectors(), VonNeumannMeasurement::computational(2).projectors());

        let h = VonNeumannMeasurement::from_unitary(&hadamard()).unwrap();
        let plus = ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let minus = ComplexMatrix::from_real(&[&[0.5, -0.5], &[-0.5, 0.5]]).unwrap();
        assert!((&h.projector(0) - &plus).max_abs() < 1e-15);
        assert!((&h.projector(1) - &minus).max_abs() < 1e-15);

        check_invariants(
            &VonNeumannMeasurement::from_unitary(&random_haar_unitary(4, 1))
                .unwrap()
                .projectors(),
        );

        let bad = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(
            VonNeumannMeasurement::from_unitary(&bad),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn qubit_chart() {
        let m = VonNeumannMeasurement::qubit(0.0, 1.3);
        for (p, q) in m
            .projectors()
            .iter()
            .zip(VonNeumannMeasurement::computational(2).projectors())
        {
            assert!((p - &q).max_abs() < 1e-15);
        }
        let pm = VonNeumannMeasurement::qubit(std::f64::consts::FRAC_PI_2, 0.0);
        let h = VonNeumannMeasurement::from_unitary(&hadamard()).unwrap();
        for (p, q) in pm.projectors().iter().zip(h.projectors()) {
            assert!((p - &q).max_abs() < 1e-15);
        }
        for &(t, f) in &[(0.3, 2.0), (2.9, -1.1), (1.0, 0.0)] {
            check_invariants(&VonNeumannMeasurement::qubit(t, f).projectors());
            assert!(VonNeumannMeasurement::qubit(t, f).basis().unitarity_residual() < 1e-14);
        }
    }

    #[test]
    fn exp_chart_gives_valid_measurements() {
        let params: Vec<f64> = (0..9).map(|k| 0.37 * k as f64 - 1.0).collect();
        let m = VonNeumannMeasurement::from_params(3, &params);
        check_invariants(&m.projectors());
        assert_eq!(
            VonNeumannMeasurement::from_params(3, &[0.0; 9]).basis(),
            &ComplexMatrix::identity(3)
        );
    }

    #[test]
    fn phase_gauge_invariance() {
        for seed in 0..20 {
            let u = random_haar_unitary(3, seed);
            let d = ComplexMatrix::from_fn(3, 3, |i, j| {
                if i == j {
                    C64::from_polar(1.0, 0.7 * i as f64 + seed as f64)
                } else {
                    c(0.0, 0.0)
                }
            });
            let a = VonNeumannMeasurement::from_unitary(&u).unwrap();
            let b = VonNeumannMeasurement::from_unitary(&(&u * &d)).unwrap();
            for (p, q) in a.projectors().iter().zip(b.projectors()) {
                assert!((p - &q).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lueders_extension() {
        let l = VonNeumannMeasurement::computational(2).lueders_extend(3);
        assert_eq!(l.dim(), 6);
        for p in l.projectors() {
            assert!((p.trace().re - 3.0).abs() < 1e-15);
        }
        check_invariants(&l.projectors());

        let m = VonNeumannMeasurement::from_unitary(&random_haar_unitary(2, 4)).unwrap();
        let l1 = m.lueders_extend(1);
        for (p, q) in l1.projectors().iter().zip(m.projectors()) {
            assert_eq!(p, &q);
        }
    }
}
