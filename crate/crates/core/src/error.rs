use thiserror::Error;

/// Errors raised by the analysis kernel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),
    #[error("canonical form not reached (best residual {residual:e})")]
    Canonicalization { residual: f64 },
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
