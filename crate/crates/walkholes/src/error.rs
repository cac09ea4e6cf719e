//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("invalid argument `{field}`: {message}")]
    Argument { field: &'static str, message: String },

    /// A request would exceed the configured memory budget.
    #[error("resource budget exceeded for {what}: requested {requested}, budget {budget}")]
    Resource {
        what: &'static str,
        requested: u64,
        budget: u64,
    },

    /// Records being merged do not belong to the same run family.
    #[error("merge conflict: {0}")]
    Conflict(String),

    /// Bad experiment name or malformed command line.
    #[error("usage error: {0}")]
    Usage(String),

    /// Config file could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn argument(field: &'static str, message: impl Into<String>) -> Self {
        Error::Argument {
            field,
            message: message.into(),
        }
    }
}
