use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("trajectory diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("degenerate sequence: {0}")]
    DegenerateSequence(String),

    #[error("sequence has {actual} samples, expected M*N = {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("Gram matrix is numerically singular (condition estimate {condition:e})")]
    SingularGram { condition: f64 },

    #[error("column {index} has zero norm")]
    ZeroColumn { index: usize },

    #[error("problem too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("error rate never crossed {threshold} for k <= {k_limit}")]
    NoCrossing { threshold: f64, k_limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
