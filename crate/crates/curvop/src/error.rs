use std::path::PathBuf;

use curvop_core::Error as CoreError;

/// Failures surfaced by the command line, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Parse { .. } => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                // Out-of-range scalars come from command-line flags such as --k.
                CoreError::Usage(_) | CoreError::Range(_) => EXIT_USAGE,
                CoreError::Numerical(_) | CoreError::InternalConsistency(_) => EXIT_NUMERICAL,
                CoreError::Dimension(_)
                | CoreError::Frame { .. }
                | CoreError::Precondition(_)
                | CoreError::NotConformallyFlat { .. }
                | CoreError::EmptyField
                | CoreError::Validation(_) => EXIT_VALIDATION,
            },
        }
    }
}
