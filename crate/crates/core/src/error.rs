use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or geometric precondition was violated; the message names the
    /// violated inequality.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("lattice mismatch: {0}")]
    GeometryMismatch(String),

    #[error("dimension {dim} exceeds the dense diagonalization cap {cap}; use the time-evolution workflows, which never need a full eigendecomposition")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("scenario `{scenario}` failed: {reason}")]
    Scenario { scenario: String, reason: String },

    #[error("parse error in {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn scenario(scenario: &str, reason: impl Into<String>) -> Self {
        Error::Scenario { scenario: scenario.to_string(), reason: reason.into() }
    }
}
