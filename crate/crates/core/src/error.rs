//! Error taxonomy shared across the crate.
//!
//! Callers that violate a documented precondition get [`Error::Contract`];
//! failures of the arithmetic itself (non-finite values, singular systems)
//! get [`Error::Numerical`]. File ingestion reports [`Error::Parse`] with a
//! 1-based location.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The computation itself failed (singularity, non-finite values).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed input file; `row`/`col` are 1-based.
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    /// Bad configuration (CLI arguments or config JSON).
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code for the CLI: 2 for config/parse problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Contract(_) | Error::Parse { .. } | Error::Config(_) | Error::Io(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
