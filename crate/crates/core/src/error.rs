use thiserror::Error;

/// Errors raised by the form toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("enumeration budget exceeded: {what} needs 2^{needed_log2} but the budget is 2^{budget_log2}")]
    BudgetExceeded {
        what: &'static str,
        needed_log2: u32,
        budget_log2: u32,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no solution found: {0}")]
    NoSolution(String),

    #[error("internal verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
