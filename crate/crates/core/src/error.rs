use thiserror::Error;

/// Errors raised by model construction, spectrum evaluation and the coding
/// and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("row {row} is not stochastic (residual {residual:e})")]
    NonStochasticMatrix { row: usize, residual: f64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("tail budget {budget:e} not reachable within support cap {cap} (tail mass {reached:e})")]
    TailBudgetExceeded { budget: f64, cap: usize, reached: f64 },

    #[error("{what}: {size} exceeds the enumeration cap {cap}")]
    CapExceeded { what: &'static str, size: f64, cap: f64 },

    #[error("outcome has zero probability")]
    ZeroProbabilityOutcome,

    #[error("information density undefined: W(y|x) = 0 and P_Y(y) = 0")]
    UndefinedDensity,

    #[error("output marginal not computable exactly and plug-in estimation is disabled")]
    MarginalUnavailable,

    #[error("quantile level {0} outside [0, 1]")]
    InvalidQuantile(f64),

    #[error("invalid schedule: {0}")]
    ScheduleInvalid(String),

    #[error("Monte Carlo budget must be at least 1")]
    ZeroBudget,

    #[error("candidate input list is empty")]
    EmptyCandidates,

    #[error("subsequence {0} is empty on the grid")]
    SubsequenceEmpty(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("incompatible models: {0}")]
    Incompatible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
