use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator produced a non-finite value at coordinate {index}")]
    NonfiniteOutput { index: usize },

    #[error("input point has a non-finite coordinate at index {index}")]
    NonfiniteInput { index: usize },

    #[error("stepsize must be positive, got {0}")]
    NonpositiveStepsize(f64),

    #[error("invalid cardinality s = {s} for dimension d = {d} (need 1 <= s <= d)")]
    InvalidCardinality { d: usize, s: usize },

    #[error("brute-force oracle supports d <= {max}, got {d}")]
    DimensionTooLarge { d: usize, max: usize },

    #[error("invalid feasible set: {0}")]
    InvalidSet(String),

    #[error("look-ahead point coincides with the current iterate")]
    Stationary,

    #[error("backtracking exceeded {limit} stepsize reductions at iteration {iteration}")]
    BacktrackLimit { iteration: usize, limit: usize },

    #[error("cannot average an empty sequence of iterates")]
    EmptyTrace,

    #[error("input is not feasible: {0}")]
    InfeasibleInput(String),

    #[error("exponent argument {value:.3e} exceeds the overflow guard {limit}")]
    Overflow { value: f64, limit: f64 },

    #[error("matrix factorization failed: {0}")]
    SingularMatrix(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid problem data: {0}")]
    InvalidProblem(String),
}

impl Error {
    /// Stable numeric code, shared with the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. } => 2,
            Error::NonfiniteOutput { .. } => 3,
            Error::NonfiniteInput { .. } => 4,
            Error::NonpositiveStepsize(_) => 5,
            Error::InvalidCardinality { .. } => 6,
            Error::DimensionTooLarge { .. } => 7,
            Error::InvalidSet(_) => 8,
            Error::Stationary => 9,
            Error::BacktrackLimit { .. } => 10,
            Error::EmptyTrace => 11,
            Error::InfeasibleInput(_) => 12,
            Error::Overflow { .. } => 13,
            Error::SingularMatrix(_) => 14,
            Error::InvalidConfig(_) => 15,
            Error::InvalidProblem(_) => 16,
        }
    }

    /// Upper-case identifier used in summaries and logs.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::NonfiniteOutput { .. } => "NONFINITE_OUTPUT",
            Error::NonfiniteInput { .. } => "NONFINITE_INPUT",
            Error::NonpositiveStepsize(_) => "NONPOSITIVE_STEPSIZE",
            Error::InvalidCardinality { .. } => "INVALID_CARDINALITY",
            Error::DimensionTooLarge { .. } => "DIMENSION_TOO_LARGE",
            Error::InvalidSet(_) => "INVALID_SET",
            Error::Stationary => "STATIONARY",
            Error::BacktrackLimit { .. } => "BACKTRACK_LIMIT",
            Error::EmptyTrace => "EMPTY_TRACE",
            Error::InfeasibleInput(_) => "INFEASIBLE_INPUT",
            Error::Overflow { .. } => "OVERFLOW",
            Error::SingularMatrix(_) => "SINGULAR_MATRIX",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::InvalidProblem(_) => "INVALID_PROBLEM",
        }
    }
}
