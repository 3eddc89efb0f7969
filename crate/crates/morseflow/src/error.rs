use std::path::PathBuf;

use morseflow_core::Error as CoreError;

/// Exit code for a run that finished and passed its checks.
pub const EXIT_OK: i32 = 0;
/// Usage or input error.
pub const EXIT_INPUT: i32 = 1;
/// A property check failed; outputs were still written.
pub const EXIT_PROPERTY: i32 = 2;
/// A numerical method failed to converge.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Property(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Property(_) => EXIT_PROPERTY,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Domain(_) | CoreError::Input(_) | CoreError::UnknownState(_) => {
                CliError::Input(msg)
            }
            CoreError::Precondition(_) | CoreError::Structural(_) => CliError::Property(msg),
            CoreError::Numerical { .. } | CoreError::ShootingMismatch { .. } | CoreError::BlowUp { .. } => {
                CliError::Numerical(msg)
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
