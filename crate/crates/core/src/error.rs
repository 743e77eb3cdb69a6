use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("generator rejected parameters: {0}")]
    Generator(String),
    #[error("oracle cap `{cap}` exceeded (limit {limit}); raise it with --caps or the matching environment variable")]
    CapExceeded { cap: &'static str, limit: u64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> CoreError {
    CoreError::Parse {
        line,
        msg: msg.into(),
    }
}
