use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("non-finite value in {context} at t = {time}")]
    NonFinite { context: &'static str, time: f64 },

    #[error("boundary condition already applied")]
    AlreadyClamped,

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-parseable category used as the prefix of CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotPositiveDefinite(_) => "not-positive-definite",
            Error::Singular(_) => "singular",
            Error::NonFinite { .. } => "non-finite",
            Error::AlreadyClamped => "already-clamped",
            Error::ConfigParse { .. } => "config-parse",
            Error::ConfigValue { .. } => "config-value",
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
