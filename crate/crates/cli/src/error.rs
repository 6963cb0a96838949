use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("route precondition violated: {0}")]
    Route(#[from] matderiv::Error),

    #[error("reference validation failed: {check} discrepancy {discrepancy:.3e} exceeds {limit:.1e}")]
    ReferenceValidation { check: String, discrepancy: f64, limit: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::Route(_) => 2,
            CliError::ReferenceValidation { .. } => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
