use thiserror::Error;

/// Errors raised by validation, construction and optimization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("not Hermitian: max |M - M^dagger| = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },

    #[error("trace is not 1: |tr - 1| = {residual:e}")]
    Trace { residual: f64 },

    #[error("not unitary: max |U^dagger U - I| = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("Kraus completeness violated: ||sum K^dagger K - I||_F = {residual:e}")]
    Incomplete { residual: f64 },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("probabilities do not sum to 1: |sum - 1| = {residual:e}")]
    Probability { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("optimizer did not converge in any start (best value {best})")]
    NotConverged { best: f64 },

    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(expected: impl ToString, got: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
