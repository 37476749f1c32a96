//! Command errors and their process exit codes.

use std::path::PathBuf;

use graphtrl::agent::AgentError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// 1 for usage and configuration, 2 for data and I/O, 3 for numerical
    /// failure during training or evaluation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<AgentError> for CliError {
    fn from(e: AgentError) -> Self {
        match e {
            AgentError::Numerical(m) => CliError::Numerical(m),
            AgentError::Config(m) => CliError::Config(m),
            AgentError::Checkpoint(m) => CliError::Config(format!("checkpoint: {m}")),
            other => CliError::Data(other.to_string()),
        }
    }
}
