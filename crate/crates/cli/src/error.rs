use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bref::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 for results that exist but are negative, 2 for bad input, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                bref::Error::NotFoundBelowCap { .. }
                | bref::Error::NonMonotoneBoundary { .. }
                | bref::Error::NoThresholdExists(_)
                | bref::Error::DegenerateDesign(_) => 1,
                _ => 2,
            },
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Csv { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
