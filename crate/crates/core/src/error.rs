//! Error type shared by all solver and model operations.

/// Errors produced by model construction, solvers, and diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Caller passed an argument that violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An index was outside the phase-space grid or group range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// The computation produced a non-finite value or other internal
    /// inconsistency; the message carries step diagnostics.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File or stream I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
