use thiserror::Error;

/// Errors produced by the laboratory operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("evaluation produced a non-finite value at x = {x}")]
    Evaluation { x: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("missing capability: {0}")]
    Capability(String),
    #[error("window error{}: {detail}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Window { detail: String, step: Option<usize> },
    #[error("oracle did not reach the requested accuracy (achieved {achieved:e}, requested {requested:e})")]
    OracleAccuracy { achieved: f64, requested: f64 },
    #[error("insufficient data: {usable} usable rows, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },
    #[error("condition {index} violated: {detail}")]
    ConditionViolated { index: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
