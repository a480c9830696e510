use formcount_core::CoreError;
use thiserror::Error;

/// Errors surfaced by the experiment layer and the CLI.
///
/// `exit_code` defines the stable process-exit contract:
/// 0 success, 1 usage, 2 validation, 3 budget refusal, 4 non-convergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("budget refusal: scan of about {estimate:.3e} points exceeds budget {budget:.3e}")]
    Budget { estimate: f64, budget: f64 },
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Budget { .. } => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded { needed, budget } => CliError::Budget {
                estimate: needed as f64,
                budget: budget as f64,
            },
            other => CliError::Validation(other.to_string()),
        }
    }
}
