use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible (non-square, wrong dims, mismatched columns).
    #[error("shape error: {0}")]
    Shape(String),

    /// A matrix expected to be Hermitian is not, beyond tolerance.
    #[error("symmetry error: ||A - A^dagger||_F = {defect:e} exceeds tolerance {tol:e}")]
    Symmetry { defect: f64, tol: f64 },

    /// A result would exceed the configured maximum matrix dimension.
    #[error("size error: dimension {dim} exceeds maximum {max}")]
    Size { dim: usize, max: usize },

    /// An argument is outside its valid domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// A probability vector or state is not normalized within tolerance.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// A structural precondition of a state family is violated.
    #[error("constraint error: {0}")]
    Constraint(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
