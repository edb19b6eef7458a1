use std::path::{Path, PathBuf};

use thiserror::Error;

use par_core::{TaskError, TrainError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("no episode logs to summarize")]
    EmptyLogs,
    #[error("completion endpoint unreachable; run stopped after {completed} of {requested} episodes")]
    EndpointUnreachable { completed: usize, requested: usize },
    #[error("endpoint: {0}")]
    Endpoint(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }
}
