use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bell_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 for anything the caller got wrong, 2 for failures on our side.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) | CliError::Input(_) => 1,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
