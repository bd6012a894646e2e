use std::path::PathBuf;

use thiserror::Error;

/// Failures that end a run with exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: no rows")]
    NoRows { path: PathBuf },

    #[error("{path}, line {line}: {message}")]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("missing input: {0}")]
    Missing(&'static str),

    #[error(transparent)]
    Domain(#[from] grand_amalgam::Error),
}

impl CliError {
    /// Stable identifier for the `error.kind` field of an error report.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::NoRows { .. } => "no-rows",
            CliError::Row { .. } => "bad-row",
            CliError::Config { .. } => "config",
            CliError::Input(_) => "input",
            CliError::Missing(_) => "missing-input",
            CliError::Domain(_) => "domain",
        }
    }

    pub fn line(&self) -> Option<u64> {
        match self {
            CliError::Row { line, .. } => Some(*line),
            _ => None,
        }
    }

    pub fn path(&self) -> Option<&PathBuf> {
        match self {
            CliError::Io { path, .. }
            | CliError::NoRows { path }
            | CliError::Row { path, .. }
            | CliError::Config { path, .. } => Some(path),
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
