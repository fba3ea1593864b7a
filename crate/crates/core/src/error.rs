use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("too many points: {count} exceeds the cap of {cap}")]
    TooManyPoints { count: usize, cap: usize },
    #[error("no points")]
    NoPoints,
    #[error("empty simplex mask")]
    EmptyMask,
    #[error("scale order violated: eps = {eps} > eps' = {eps_prime}")]
    ScaleOrder { eps: f64, eps_prime: f64 },
    #[error("xi must be nonzero")]
    ZeroXi,
    #[error("sub-basis is not contained in the full basis")]
    NotASubset,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("composite basis is empty")]
    EmptyBasis,
    #[error("no marked states: the projected amplitude is zero")]
    NoMarkedStates,
    #[error("M must be a power of two, got {0}")]
    BadM(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("l*xi = {0} is not an integer bin in [0, M)")]
    NonIntegerPeak(f64),
    #[error("ambiguous rounding: N*P(l) = {0} is more than 0.3 from an integer")]
    AmbiguousRounding(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
