//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by index loading, retrieval, providers, and tooling.
#[derive(Debug, Error)]
pub enum Error {
    /// A record in the index file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A record references an id that does not exist in the index.
    #[error("referential error: {message}")]
    Referential { message: String },

    /// An entity carries a type label that the schema does not define.
    #[error("schema error: {message}")]
    Schema { message: String },

    /// Graph operation preconditions violated (unknown seed, zero hops, ...).
    #[error("graph error: {message}")]
    Graph { message: String },

    /// Vector store misuse: dimension mismatch or degenerate embedding.
    #[error("vector error: {message}")]
    Vector { message: String },

    /// Live provider transport failure.
    #[error("provider transport error: {message}")]
    Transport { message: String },

    /// A provider response could not be parsed into the stage's shape,
    /// even after the configured number of attempts. Carries the raw text.
    #[error("provider parse error after {attempts} attempt(s): {message}\n--- raw response ---\n{raw}")]
    ResponseParse {
        attempts: u32,
        message: String,
        raw: String,
    },

    /// Invalid configuration value; names the offending field.
    #[error("config error: {field}: {message}")]
    Config { field: String, message: String },

    /// Prompt template problems (missing file, unresolved placeholder).
    #[error("template error: {message}")]
    Template { message: String },

    /// Corpus preparation failure that aborts the current item.
    #[error("corpus error: {message}")]
    Corpus { message: String },

    /// Evaluation input problems (empty ground truth, unknown ids).
    #[error("eval error: {message}")]
    Eval { message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn graph(message: impl Into<String>) -> Self {
        Error::Graph {
            message: message.into(),
        }
    }

    pub fn vector(message: impl Into<String>) -> Self {
        Error::Vector {
            message: message.into(),
        }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn corpus(message: impl Into<String>) -> Self {
        Error::Corpus {
            message: message.into(),
        }
    }

    pub fn eval(message: impl Into<String>) -> Self {
        Error::Eval {
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
