use thiserror::Error;

/// Errors raised by the exact geometry and properness routines.
///
/// A criterion that fails is never an error; it is reported as data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no primitive representative")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid rational {input:?}: {reason}")]
    InvalidRational { input: String, reason: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope is not full-dimensional")]
    NotFullDimensional,

    #[error("group does not preserve polytope")]
    GroupDoesNotPreserve,

    #[error("divisor is not ample")]
    NotAmple,

    #[error("divisor is not nef")]
    NotNef,

    #[error("class not Kähler")]
    ClassNotKahler,

    #[error("alpha unavailable: {0}")]
    AlphaUnavailable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
