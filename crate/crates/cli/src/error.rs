use std::io;
use std::path::PathBuf;

use lottery_ricker::Error as ModelError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad config file, or an option outside its admissible range.
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Model(e) => match e {
                ModelError::InvalidParameter { .. }
                | ModelError::InvalidState { .. }
                | ModelError::Singular
                | ModelError::EqualGrowthRates
                | ModelError::Precondition(_)
                | ModelError::Unsupported(_) => EXIT_VALIDATION,
                ModelError::NonFinite
                | ModelError::Overflow { .. }
                | ModelError::NoBoundaryCycle { .. }
                | ModelError::NoInteriorOrbit(_)
                | ModelError::StaleOrbit { .. }
                | ModelError::NotConverged(_) => EXIT_NUMERICAL,
            },
            CliError::Io { .. } | CliError::Csv(_) => EXIT_IO,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
