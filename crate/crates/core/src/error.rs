use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("subfactor {factor} does not coarsen its factor (block {block} straddles subfactor blocks)")]
    NotCoarsening { factor: usize, block: usize },
    #[error("inconsistent pushforwards: {0}")]
    InconsistentPushforward(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("invalid factor map: {0}")]
    InvalidFactorMap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("direct-sum decomposition check failed: {0}")]
    Decomposition(String),
    #[error("search size {needed} exceeds budget {budget}")]
    OverBudget { needed: u128, budget: u128 },
    #[error("index overflow: need {needed} entries, have {available}")]
    IndexOverflow { needed: usize, available: usize },
    #[error("law is not stationary: {0}")]
    NotStationary(String),
    #[error("removal hypotheses not satisfied: {0}")]
    Hypotheses(String),
    #[error("malformed input at {path}: {message}")]
    Json { path: String, message: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
