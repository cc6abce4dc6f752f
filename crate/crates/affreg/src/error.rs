use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the registration library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point-set must contain at least one point")]
    EmptyPointSet,

    #[error("non-finite coordinate in point {index}")]
    NonFinitePoint { index: usize },

    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: line {line}: {reason}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{}: file contains no points", path.display())]
    NoPoints { path: PathBuf },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by unreadable or malformed input data,
    /// as opposed to invalid parameter settings.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Malformed { .. } | Error::NoPoints { .. } | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
