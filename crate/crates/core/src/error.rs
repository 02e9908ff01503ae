use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grammar: {0}")]
    Grammar(String),
    #[error("position out of range: {0}")]
    Range(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("symbol {0} does not occur in the reference")]
    SymbolAbsent(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
