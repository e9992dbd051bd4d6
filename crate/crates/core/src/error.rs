use thiserror::Error;

/// Errors produced by the library and mapped to CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource cap exceeded: {what} needs {requested} entries but the cap is {cap}")]
    Resource {
        what: String,
        requested: u128,
        cap: u128,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precision of {have} bits is insufficient ({reason}); retry with at least {suggested} bits")]
    Precision {
        have: usize,
        suggested: usize,
        reason: String,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// Process exit code used by the CLI: 3 for resource caps, 2 for usage
    /// and input problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 3,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
