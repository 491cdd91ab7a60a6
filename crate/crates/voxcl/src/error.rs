//! Error taxonomy shared across the crate.
//!
//! Exit-code mapping used by the CLI: config/param errors -> 2,
//! data/format/io errors -> 3, numeric errors -> 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value or incompatible option combination.
    #[error("config error: {0}")]
    Config(String),

    /// Invalid argument to an operation (shape mismatch, out-of-bounds box).
    #[error("param error: {0}")]
    Param(String),

    /// Malformed file contents; `offset` is the byte position of the failure.
    #[error("format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },

    /// Data that parses but violates a contract (missing labels, bad class id).
    #[error("data error: {0}")]
    Data(String),

    /// Numeric-domain failure (zero vector in cosine similarity, non-finite loss).
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            msg: msg.into(),
        }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Param(_) => 2,
            Error::Format { .. } | Error::Data(_) | Error::Io(_) => 3,
            Error::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
