use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    /// A malformed cell. `row` is 1-based and counts the header as row 1.
    #[error("{path}: row {row}, column '{column}': {message}")]
    Cell {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pattern has {count} active features but at most {cap} are allowed")]
    PatternTooLarge { count: usize, cap: usize },

    #[error("candidate set of {0} features is too large for exact enumeration (limit 20)")]
    TooManyCandidates(usize),

    #[error("screening left no candidate features; relax the screen ({0})")]
    EmptyCandidateSet(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Errors caused by bad user-supplied values rather than by the data or
    /// the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch { .. }
                | Error::PatternTooLarge { .. }
                | Error::TooManyCandidates(_)
                | Error::NotPositiveDefinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
