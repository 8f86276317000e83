use polycat_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("syntax: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{kind} `{name}`: unknown reference `{target}`")]
    Reference { kind: &'static str, name: String, target: String },
    #[error("no {kind} named `{name}`")]
    Missing { kind: &'static str, name: String },
    #[error("{kind} `{name}`: {message}")]
    Malformed { kind: &'static str, name: String, message: String },
    #[error("{kind} `{name}`: {source}")]
    Invalid { kind: &'static str, name: String, source: CoreError },
}

/// Everything a command can fail with, sorted by exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Guard(String),
    #[error("law violation: {0}")]
    Law(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Guard(_) => 3,
            Failure::Law(_) => 4,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SearchTooLarge { .. } => Failure::Guard(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Invalid { source: CoreError::SearchTooLarge { .. }, .. } => Failure::Guard(e.to_string()),
            DocError::Invalid { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Parse(e.to_string())
    }
}
