use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed chip-table or configuration text.
    #[error("format error: {0}")]
    Format(String),
    /// Well-formed input that violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// Bad argument passed to an operation (lengths, ratios, oversampling).
    #[error("argument error: {0}")]
    Argument(String),
    /// Numerical routine failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
