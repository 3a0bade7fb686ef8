use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {reason} (residual {residual:e})")]
    NumericalFailure { reason: String, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(reason: impl Into<String>, residual: f64) -> Self {
        Error::NumericalFailure {
            reason: reason.into(),
            residual,
        }
    }
}
