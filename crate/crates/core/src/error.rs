use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid presentation: {0}")]
    Structure(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("presentation is inconsistent: {0}")]
    Inconsistent(String),

    #[error("vector has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },

    #[error("exponent {value} out of range at position {index} (relative order {order})")]
    OutOfRange { index: usize, value: u32, order: u32 },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("subgroup is not contained in the given subgroup")]
    NotContained,

    #[error("images do not define a homomorphism: relation {0} is not preserved")]
    NotHomomorphism(String),

    #[error("nilpotency class {0} exceeds 5")]
    ClassTooLarge(usize),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("deadline exceeded")]
    Timeout,

    #[error("not applicable: {0}")]
    Applicability(String),

    #[error("catalog: {0}")]
    Catalog(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
