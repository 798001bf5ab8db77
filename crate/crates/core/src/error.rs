use thiserror::Error;

/// Errors raised by the estimation, allocation and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} is singular or indefinite (condition number {condition:.3e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported problem size: {0}")]
    UnsupportedSize(String),

    #[error("scenario construction failed: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
