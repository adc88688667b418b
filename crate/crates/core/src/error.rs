use std::io;

use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum DmaxError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("direction ({0}, {1}) is not a unit vector")]
    NonUnitVector(f64, f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = DmaxError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> DmaxError {
    DmaxError::InvalidArgument(msg.into())
}
