//! CLI error taxonomy and exit-code mapping.

use setr_core::Error as CoreError;
use thiserror::Error;

/// Exit code 0: success. 2: configuration or validation problem. 3: a
/// numerical failure (divergent expectation, non-convergence). 1: IO and
/// everything else.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(CoreError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Maps a core error to the CLI taxonomy: contract violations are the
/// config's fault (exit 2), numerical outcomes are exit 3.
pub fn classify(e: CoreError) -> CliError {
    match e {
        CoreError::InvalidParameter { .. } | CoreError::Domain { .. } => {
            CliError::Validation(e.to_string())
        }
        CoreError::NonConvergence { .. }
        | CoreError::NonFiniteIntegrand { .. }
        | CoreError::TailUndefined { .. }
        | CoreError::DivergentExpectation => CliError::Numerical(e),
    }
}
