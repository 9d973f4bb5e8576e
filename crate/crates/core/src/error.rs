use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order {0} must lie in (0, 1)")]
    InvalidOrder(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("argument {value} outside the supported domain: {what}")]
    Domain { what: &'static str, value: f64 },
    #[error("linear system not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("mean constraint violated by {0:e}")]
    ConstraintViolation(f64),
    #[error("observation not strictly positive at step {index}: {value}")]
    NonPositiveData { index: usize, value: f64 },
    #[error("potential sample {value} at step {index} outside [0, {bound}]")]
    Inadmissible { index: usize, value: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
