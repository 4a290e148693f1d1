use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability at atom {index} is not strictly positive: {value}")]
    NonPositiveProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    ProbabilitiesDoNotSumToOne { sum: f64 },
    #[error("probability space has no atoms")]
    EmptySpace,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("atom index {index} out of range for {atoms} atoms")]
    IndexOutOfRange { index: usize, atoms: usize },
    #[error("AVaR level must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("invalid distortion function: {0}")]
    InvalidDistortion(String),
    #[error("scenario family is empty")]
    EmptyScenarioSet,
    #[error("scenario density is negative at atom {index}")]
    NegativeDensity { index: usize },
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("generator set is empty")]
    EmptyGeneratorSet,
    #[error("scaling factors must be strictly positive")]
    NonPositiveScale,
    #[error("result leaves the orthant/half-space class: {0}")]
    NotRepresentable(String),
    #[error("operation supports dimension 2 only, got {0}")]
    UnsupportedDimension(usize),
    #[error("set has an unbounded Pareto frontier")]
    Unbounded,
    #[error("curves are sampled on different grids")]
    GridMismatch,
    #[error("selection budget exceeded: {required} selections required, cap is {cap}")]
    SelectionBudgetExceeded { required: u128, cap: u64 },
    #[error("risk measure is not convex: {0}")]
    NonConvexRisk(String),
    #[error("closed-form precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("transfer coordinates must have opposite signs (x*y < 0)")]
    SameSignTransfer,
    #[error("three-point set must satisfy x1 < 0 < x3 and y1 > 0 > y3")]
    OrientationViolated,
    #[error("scenario file: {0}")]
    Schema(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}
