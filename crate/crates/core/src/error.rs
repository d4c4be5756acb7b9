use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error at line {line}: {msg}")]
    InputLine { line: usize, msg: String },
    #[error("input error: {0}")]
    Input(String),
    #[error("degenerate cut: {0}")]
    DegenerateCut(String),
    #[error("zero-weight side: {0}")]
    ZeroWeight(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("replay mismatch: {0}")]
    Replay(String),
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
