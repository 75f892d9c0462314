use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("numerically singular matrix: {0}")]
    Singular(String),
    #[error("root finder failed for order {order}: residual {residual:e}")]
    RootFailure { order: usize, residual: f64 },
    #[error("inexact division by A in the C_k recurrence at k = {0}")]
    InexactDivision(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Invalid(_) | Error::Dimension(_) | Error::Parse(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
