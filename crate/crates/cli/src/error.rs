use thiserror::Error;

use exodromy::exit::ExitError;
use exodromy::rep::RepError;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input (exit code 2).
    #[error("{0}")]
    Validation(String),
    /// Localization did not stabilize under `--require-certified` (exit code
    /// 3). `output` is the report that would have been printed.
    #[error("{message}")]
    Uncertified { message: String, output: String },
    /// Enumeration would exceed `--budget` (exit code 4).
    #[error("{0}")]
    Budget(String),
    /// A module invariant failed (exit code 5).
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Uncertified { .. } => 3,
            CliError::Budget(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            RepError::ReassemblyFailed(_) => CliError::Internal(e.to_string()),
            RepError::Exit(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ExitError> for CliError {
    fn from(e: ExitError) -> Self {
        match e {
            ExitError::DepthExhausted { .. } => {
                CliError::Uncertified { message: e.to_string(), output: String::new() }
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}
