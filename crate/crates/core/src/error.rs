use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("schedule exceeds cap {0}")]
    CapExceeded(usize),
    #[error("run cannot be mapped: {0}")]
    RunMapping(String),
    #[error("strategy fault: {0}")]
    StrategyFault(String),
    #[error("not a fixed point: {0}")]
    NotFixedPoint(String),
    #[error("audit failed: {0}")]
    Audit(String),
    #[error("oracle precondition violated: {0}")]
    OraclePrecondition(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
