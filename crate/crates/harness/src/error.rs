use thiserror::Error;

/// Failures surfaced by the CLI, each with a fixed process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("size guard: {0}")]
    Guard(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Guard(_) => 3,
            HarnessError::Validation(_) | HarnessError::Io(_) | HarnessError::Csv(_) => 1,
        }
    }
}

impl From<jasa_core::Error> for HarnessError {
    fn from(e: jasa_core::Error) -> Self {
        match e {
            jasa_core::Error::TooLarge(_) => HarnessError::Guard(e.to_string()),
            other => HarnessError::Config(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
