use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors split along the CLI exit-code contract: invalid input/configuration
/// versus numerical failure of a solver stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure in {stage}: {message}")]
    Numerical { stage: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numerical(stage: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Numerical {
            stage: stage.into(),
            message: msg.into(),
        }
    }

    /// CLI exit code: 2 for config errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 2,
            _ => 3,
        }
    }
}
