use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator universes differ: {0} vs {1}")]
    GeneratorMismatch(usize, usize),
    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("exponential needs an even element with zero body: {0}")]
    NotNilpotentEven(&'static str),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("singular body: {0}")]
    SingularBody(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
