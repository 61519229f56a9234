//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by this crate.
///
/// The CLI maps these onto exit codes: [`Error::Numeric`] exits with 3,
/// everything else (invalid parameters, malformed files, I/O) with 2.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input violates its documented domain.
    #[error("invalid input: {0}")]
    Domain(String),

    /// A numeric operation failed (non positive definite matrix, vanishing
    /// Schur complement, and similar).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A text file could not be parsed.
    #[error("parse error in {path}, line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// I/O failure, annotated with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Exit code used by the command line interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
