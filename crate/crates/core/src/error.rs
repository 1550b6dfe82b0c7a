use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value is outside its valid domain.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input data are unusable (empty, NaN, mismatched lengths).
    #[error("invalid data: {0}")]
    Data(String),

    /// An operation was called before its preconditions were met.
    #[error("invalid state: {0}")]
    State(String),

    /// A reward does not fit the assumptions of the policy consuming it.
    #[error("environment mismatch: {0}")]
    EnvironmentMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn data_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Data(msg.into()))
}
