use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a structural invariant (antisymmetry, independence, ...).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    /// Argument outside the documented domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// An operation has no certified implementation for the given input,
    /// e.g. the dual of an opaque norm.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Enumeration budget exhausted.
    #[error("resource limit exceeded: {what} (limit {limit}, reached {reached})")]
    Resource {
        what: String,
        limit: u64,
        reached: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse classification used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Resource,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Resource { .. } => ErrorKind::Resource,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
