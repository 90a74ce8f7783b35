use thiserror::Error;

/// Library error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Usage(String),
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("spectral parameter {re} + {im}i is too close to the spectrum of the free operator")]
    SingularResolvent { re: f64, im: f64 },
    #[error("spectral parameter {re} + {im}i lies on the branch cut")]
    OnCut { re: f64, im: f64 },
    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    Truncation { tail: f64, tol: f64 },
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("theorem check failed: {0}")]
    TheoremViolation(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
