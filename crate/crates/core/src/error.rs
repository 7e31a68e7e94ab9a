use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("probability {0:e} too close to 0 or 1 for a finite quantile")]
    Underflow(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid values: {0}")]
    InvalidValues(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not enough samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
