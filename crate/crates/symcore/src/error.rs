use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("only {valid} of {needed} probe points were valid")]
    ProbeFailure { valid: usize, needed: usize },
    #[error("division by an expression that is identically zero")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, SymError>;
