use corrko_core::CoreError;
use thiserror::Error;

use crate::check::Violation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("{n} vertices exceed the exact-solver cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("infeasible path: {0}")]
    Infeasible(Violation),
    #[error("no feasible path exists")]
    NoFeasiblePath,
    #[error("portal structure rejected: {0}")]
    BadPortals(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, DetError>;
