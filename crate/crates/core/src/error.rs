use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {matrix} at ({row}, {col})")]
    NonFiniteEntry {
        matrix: &'static str,
        row: usize,
        col: usize,
    },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("the pencil A - lambda*E is singular (det identically zero)")]
    SingularPencil,

    #[error("QZ iteration failed to converge ({0})")]
    IterationFailure(String),

    #[error("generalized Schur block swap rejected at position {position}: eigenvalues too close")]
    SwapIllConditioned { position: usize },

    #[error("eigenvalue on the stability boundary: {0}")]
    BoundaryEigenvalue(String),

    #[error("no solution exists: {0}")]
    NoSolution(String),

    #[error("partial feedback gain {gain:.3e} exceeds limit {limit:.3e} at step {step}")]
    GainLimitExceeded { step: usize, gain: f64, limit: f64 },

    #[error("realization is singular at the evaluation point")]
    SingularAtPoint,

    #[error("singular block: {0}")]
    SingularBlock(String),

    #[error("LAPACK routine {routine} returned info = {info}")]
    Lapack { routine: &'static str, info: i32 },
}

impl Error {
    /// True for failures caused by the numerical content of the input rather than by its shape.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularPencil
                | Error::IterationFailure(_)
                | Error::SwapIllConditioned { .. }
                | Error::GainLimitExceeded { .. }
                | Error::SingularAtPoint
                | Error::SingularBlock(_)
                | Error::Lapack { .. }
        )
    }
}
