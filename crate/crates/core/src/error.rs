use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Siegel point: {0}")]
    InvalidPoint(String),

    #[error("unsupported Siegel point: {0}")]
    UnsupportedPoint(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("level must be a positive integer")]
    InvalidLevel,

    #[error("quadrature grid has {got} points per coordinate, need at least {required}")]
    InsufficientGrid { required: usize, got: usize },

    #[error("truncation policy does not match the evaluation: {0}")]
    PolicyMismatch(String),

    #[error("operator side {0} exceeds the dense limit of {max}", max = crate::linalg::MAX_DENSE_DIM)]
    TooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
