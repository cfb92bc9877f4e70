use thiserror::Error;

/// Errors raised by matrix construction, functional evaluation and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive definite: minimum eigenvalue {min_eigenvalue:e} <= floor {floor:e}")]
    NotPositiveDefinite { min_eigenvalue: f64, floor: f64 },

    #[error("not a contraction: operator norm {norm} exceeds 1 + {tolerance:e}")]
    NotAContraction { norm: f64, tolerance: f64 },

    #[error("blocks do not sum to the identity: deviation {deviation:e}")]
    NotAnIsometry { deviation: f64 },

    #[error("eigenvalue {eigenvalue:e} is outside the domain of the matrix function")]
    Domain { eigenvalue: f64 },

    #[error("eigensolver failed to converge for a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("objective or gradient became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Whether the error comes from floating-point breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalInconsistency(_) | Error::NonFiniteObjective { .. } | Error::ConvergenceFailure { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
