//! Harness-level errors and process exit-code mapping.

use onebit_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("adaptive loop aborted at round {round}: {cause}")]
    AdaptiveAbort { round: usize, cause: CoreError },
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Process exit codes: 0 success, 2 invalid config/input, 3 solver failure,
/// 4 infeasible instance.
pub fn exit_code(err: &HarnessError) -> i32 {
    match err {
        HarnessError::Config(_) | HarnessError::Io { .. } | HarnessError::Parse { .. } => 2,
        HarnessError::Core(core) | HarnessError::AdaptiveAbort { cause: core, .. } => match core {
            CoreError::SolverFailure(_) => 3,
            CoreError::InfeasibleMeasurements | CoreError::InfeasibleAtSparsity { .. } => 4,
            CoreError::InvalidArgument(_) | CoreError::TooLarge(_) => 2,
        },
    }
}
