use corrko_core::CoreError;
use corrko_detsolve::DetError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("cut separation did not converge within {0} rounds")]
    SeparationLimit(usize),
    #[error("LP is {0}")]
    Status(&'static str),
    #[error("{n} vertices exceed the LP cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, LpError>;
