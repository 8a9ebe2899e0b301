use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the admissible range {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        lo: u64,
        hi: u64,
    },

    #[error("invalid ranking {order:?}: {reason}")]
    InvalidRanking { order: Vec<usize>, reason: String },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("enumeration needs {count} profiles but the budget is {budget}")]
    BudgetExceeded { count: u128, budget: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),
}

pub(crate) fn check_range(what: &'static str, value: u64, lo: u64, hi: u64) -> Result<()> {
    if value < lo || value > hi {
        Err(Error::OutOfRange { what, value, lo, hi })
    } else {
        Ok(())
    }
}
