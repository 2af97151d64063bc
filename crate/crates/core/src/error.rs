use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("requirement {0} cannot be satisfied even by the full ground set")]
    InfeasibleRequirement(usize),

    #[error("requirement index {index} out of range (n = {n})")]
    RequirementOutOfRange { index: usize, n: usize },

    #[error("element index {index} out of range (m = {m})")]
    ElementOutOfRange { index: usize, m: usize },

    #[error("knapsack reduction would emit {count} partition matroids, above the cap of {cap}")]
    EnumerationCapExceeded { count: String, cap: u64 },

    #[error("exact oracle refuses: {what} is {value}, budget is {limit}")]
    BudgetExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver did not terminate within {0} iterations")]
    NonTermination(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInstance(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
