use atto_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Core(#[from] Error),
    /// Membership procedures disagreed on the same operator.
    #[error("methods disagree: {0}")]
    Disagreement(String),
}

impl CliError {
    /// 2 for bad input, 3 for a negative answer, 4 for indeterminate or
    /// internally inconsistent results.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Json(_) => 2,
            CliError::Disagreement(_) => 4,
            CliError::Core(e) => match e {
                Error::Indeterminate { .. }
                | Error::Inconsistent(_)
                | Error::DichotomyViolation { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::ToleranceBreakdown { .. }
                | Error::RootResidual { .. } => 4,
                Error::RankNotOne { .. } | Error::NotMember { .. } => 3,
                _ => 2,
            },
        }
    }
}
