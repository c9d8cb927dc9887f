use thiserror::Error;

/// Errors raised by the lab. The variants map one-to-one onto the CLI exit
/// codes (configuration and usage errors exit 2, resolution errors 3,
/// divergence 4).
#[derive(Debug, Error)]
pub enum DlabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DlabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DlabError::Config(_) | DlabError::Usage(_) | DlabError::Format(_) => 2,
            DlabError::Resolution(_) => 3,
            DlabError::Divergence(_) => 4,
            DlabError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, DlabError>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(DlabError::Config(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(DlabError::Usage(msg.into()))
}

pub(crate) fn resolution<T>(msg: impl Into<String>) -> Result<T> {
    Err(DlabError::Resolution(msg.into()))
}
