use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input outside an operation's domain, e.g. an empty readings vector.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computation could not complete (iteration cap, non-finite values).
    #[error("fault: {0}")]
    Fault(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by user input rather than the computation.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Domain(_) | Error::Json(_) | Error::Toml(_)
        )
    }
}
