use thiserror::Error;

/// Crate-wide error type.
///
/// Construction and parsing functions return `Result<_, Error>`; arithmetic
/// between already-validated values panics on programmer error (mismatched
/// algebras) with a message naming the offending operands.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(u8),

    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: u8, dim: u8 },

    #[error("pair index requires two distinct components, got ({0},{0})")]
    DiagonalPair(u8),

    #[error("generator {gen} is not valid in {algebra}")]
    InvalidGenerator { gen: String, algebra: String },

    #[error("algebra mismatch: {left} vs {right}")]
    AlgebraMismatch { left: String, right: String },

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix entries must contain only derivative generators, found {0}")]
    NotDerivativeOnly(String),

    #[error("states must contain only coordinate generators, found {0}")]
    NotCoordinateOnly(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("structure constants fail antisymmetry at ({mu},{nu},{alpha})")]
    NotAntisymmetric { mu: u8, nu: u8, alpha: u8 },

    #[error("structure constants fail the Jacobi identity at ({mu},{alpha},{beta})")]
    JacobiFailure { mu: u8, alpha: u8, beta: u8 },

    #[error("label {label} is absent from the realization")]
    MissingLabel { label: String },
}
