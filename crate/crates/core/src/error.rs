use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZkError {
    #[error("modulus {0} outside supported range 2..=1000")]
    ModulusOutOfRange(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("code is not self-dual")]
    NotSelfDual,
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("length {0} exceeds supported maximum {1}")]
    LengthUnsupported(usize, usize),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("lattice error: {0}")]
    Lattice(String),
    #[error("time budget exhausted after {0:.1}s")]
    TimeExhausted(f64),
    #[error("malformed database: line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ZkError {
    fn from(e: std::io::Error) -> Self {
        ZkError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ZkError>;
