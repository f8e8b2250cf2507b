use std::path::PathBuf;

use crate::cmap::Stage;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("input too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("correlation map is at stage {found:?}, this step expects {expected}")]
    Stage { found: Stage, expected: &'static str },

    #[error("no spectrum bins fall inside the search window of harmonic {harmonic}")]
    EmptyHarmonicWindow { harmonic: usize },

    #[error("ENVSI score is undefined when the raw ENVSI is zero")]
    UndefinedScore,

    #[error("{0} is not implemented")]
    NotImplemented(&'static str),

    #[error("malformed input {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
