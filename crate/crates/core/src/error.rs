use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("scale factor on axis {axis} must be positive, got {value}")]
    NonPositiveScale { axis: usize, value: f64 },

    #[error("exponent p must lie in [1, inf], got {0}")]
    InvalidExponent(f64),

    #[error("weight r[{axis}] must be strictly positive and finite, got {value}")]
    InvalidWeight { axis: usize, value: f64 },

    #[error("the scaling isometry is only defined for finite p")]
    InfiniteExponent,

    #[error("formal square root needs a strictly positive constant term, got {0}")]
    NonPositiveConstant(f64),

    #[error("f(0) = {0} < 0: f is not a coefficientwise limit of squares")]
    NegativeConstant(f64),

    #[error("polynomial degree {degree} exceeds available moment degree {max_degree}")]
    DegreeOverflow { degree: usize, max_degree: usize },

    #[error("moment matrix needs moments up to degree {required}, only {available} available")]
    InsufficientMoments { required: usize, available: usize },

    #[error("moment sequence is missing s({0})")]
    MissingMoment(String),

    #[error("duplicate exponent {0}")]
    DuplicateExponent(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("f takes the value {value} < 0 at {point:?} inside the box")]
    PreconditionViolated { point: Vec<f64>, value: f64 },

    #[error("no SOS certificate found (inconclusive): residual {residual:e} after {iterations} iterations")]
    SosInconclusive { residual: f64, iterations: usize },

    #[error("no SOS certificate up to perturbation degree {max_degree} (inconclusive): best residual {residual:e}")]
    ApproxInconclusive { max_degree: usize, residual: f64 },

    #[error("measure recovery failed: residual {residual:e} after {iterations} iterations")]
    RecoveryFailed { residual: f64, iterations: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
