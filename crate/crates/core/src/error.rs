use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("truncated mass deficit {deficit:e} exceeds tolerance {tolerance:e}")]
    TruncationInsufficient { deficit: f64, tolerance: f64 },
    #[error("operation `{0}` is not supported for this space kind")]
    UnsupportedKind(&'static str),
    #[error("atom {0} has no neighbors for a finite-difference gradient")]
    MissingNeighbors(usize),
    #[error("field has {got} values but the space has {expected} atoms")]
    Misaligned { expected: usize, got: usize },
    #[error("field contains a non-finite value at atom {0}")]
    NonFiniteValue(usize),
    #[error("weight must be positive, found {value} at atom {atom}")]
    NonpositiveWeight { atom: usize, value: f64 },
    #[error("operation requires a finite-measure space")]
    InfiniteMeasure,
    #[error("argument {value} outside the domain {domain}")]
    OutOfDomain { value: f64, domain: String },
    #[error("target {target} not bracketed by [{lo}, {hi}]")]
    TargetOutOfBracket { target: f64, lo: f64, hi: f64 },
    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),
    #[error("weight is not isoperimetric: its constant is infinite")]
    WeightNotIsoperimetric,
    #[error("profile function g violates sup g*Phi < infinity")]
    GViolatesCondition,
    #[error("cumulative measure map is not monotone")]
    NonmonotoneMeasureMap,
    #[error("Marcinkiewicz norm of g is infinite")]
    GNormInfinite,
    #[error("profiles are not ordered: I1({t}) = {i1} < I2({t}) = {i2}")]
    ProfilesNotOrdered { t: f64, i1: f64, i2: f64 },
    #[error("operator norm unavailable: {0}")]
    OperatorNormUnavailable(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
