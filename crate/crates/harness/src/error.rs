use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] ffgcd_core::Error),

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),

    #[error("invalid option: {0}")]
    Option(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(#[from] toml::de::Error),
}

pub type HResult<T> = Result<T, HarnessError>;
