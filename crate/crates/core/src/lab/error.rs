use std::path::PathBuf;

use thiserror::Error;

use crate::error::ModelError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("could not parse scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("could not emit scenario: {0}")]
    Emit(#[from] toml::ser::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown preset or missing file {name:?}; presets: {available}")]
    UnknownSource { name: String, available: String },
    #[error("integration stopped early: {0}")]
    Integration(String),
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad input, 3 for failed integration.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Integration(_) => 3,
            _ => 2,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
