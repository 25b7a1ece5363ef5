//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input at a known line of a text format (.mel, edge list, MusicXML).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A valid input that violates a domain precondition ("empty melody",
    /// "no sequence stored", "fully disconnected", ...).
    #[error("{0}")]
    Domain(String),

    /// Corpus run found nothing to analyze, or nothing parsed successfully.
    #[error("{0}")]
    CorpusEmpty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Broken internal invariant; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
