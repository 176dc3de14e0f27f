use std::path::PathBuf;

use thiserror::Error;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Core { context: String, source: gsdeconv::Error },
    #[error("{0}")]
    Data(String),
    #[error("{path}: invalid config: {message}")]
    Config { path: PathBuf, message: String },
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::NonConvergence(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn core(context: impl Into<String>) -> impl FnOnce(gsdeconv::Error) -> Self {
        let context = context.into();
        move |source| HarnessError::Core { context, source }
    }
}
