use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("invalid transversal: {0}")]
    InvalidTransversal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("base measure mismatch: {0}")]
    BaseMismatch(String),
    #[error("function not in operator range, residual {residual:.3e}")]
    RangeViolation { residual: f64 },
    #[error("input error: {0}")]
    Input(String),
    #[error("cross-check failure: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
