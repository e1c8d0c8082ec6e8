use thiserror::Error;

#[derive(Debug, Error)]
pub enum TomError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("template error: {0}")]
    Template(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Backend(#[from] crate::backend::BackendError),
    #[error(transparent)]
    Game(#[from] guandan::GameError),
}

pub type Result<T> = std::result::Result<T, TomError>;
