use thiserror::Error;

/// Failures of a CLI run, each with its exit code.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Assertion(_) => 1,
            LabError::Config(_) | LabError::Io(_) => 2,
            LabError::NonConvergence(_) => 3,
        }
    }
}

impl From<anisodrop::Error> for LabError {
    fn from(e: anisodrop::Error) -> Self {
        LabError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Config(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(std::io::Error::other(e.to_string()))
    }
}

pub type LabResult<T> = Result<T, LabError>;
