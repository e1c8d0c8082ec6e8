use thiserror::Error;

/// Errors raised by the rules engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid combo: expected {expected}: {reason}")]
    InvalidCombo { expected: &'static str, reason: String },
    #[error("invalid wildcard use: {0}")]
    InvalidWild(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("illegal action: {0}")]
    IllegalAction(String),
    #[error("malformed text: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GameError>;
