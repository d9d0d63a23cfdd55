use thiserror::Error;

/// Errors surfaced by the library.
///
/// `InvalidInput` covers everything a caller can fix (bad polynomials,
/// rank-deficient generator sets, out-of-range oracle targets).
/// `Internal` means a cross-checked identity failed to hold, which
/// indicates a bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> Error {
    Error::Unsupported(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
