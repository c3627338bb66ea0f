use thiserror::Error;

/// Errors raised anywhere in the certification pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by an interval containing zero")]
    DivisionByIntervalContainingZero,
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("midpoint matrix is numerically singular")]
    SingularMidpoint,
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("every maximal minor encloses zero")]
    AllMinorsDegenerate,
    #[error("tangent is orthogonal to the tracking axis")]
    TangentVertical,
    #[error("a tangent cone encloses the zero vector")]
    ZeroInCone,
    #[error("precision ladder exhausted at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("computation stalled at {bits} bits of precision: {reason}")]
    PrecisionNeeded { bits: u32, reason: String },
    #[error("maximum number of restarts reached (rho = {rho}): {reason}")]
    MaxRestarts { rho: String, reason: String },
    #[error("start point lies outside the region of interest")]
    InvalidRegion,
    #[error("start point could not be certified: {0}")]
    UncertifiedStart(String),
    #[error("step budget of {0} tubes exceeded")]
    StepBudgetExceeded(usize),
    #[error("refinement budget exceeded: {0}")]
    RefinementBudgetExceeded(String),
    #[error("invalid precision {0}: must be a power of two in 64..=4096")]
    InvalidPrecision(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures that a higher working precision may resolve.
    pub fn is_precision_related(&self) -> bool {
        matches!(self, Error::PrecisionNeeded { .. } | Error::SingularMidpoint)
    }
}
