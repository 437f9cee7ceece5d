use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("Clifford dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("unsupported perturbation grade {0} (at most 3)")]
    UnsupportedGrade(usize),
    #[error("not integrable on the real line: numerator degree {num_degree} exceeds {max}")]
    DegreeCondition { num_degree: usize, max: i64 },
    #[error("sphere integrand contains the normal covariable")]
    NormalCovariableInSphere,
    #[error("expansion `{op}` has no order {order}")]
    InsufficientDepth { op: String, order: i32 },
    #[error("unknown operator preset `{0}`")]
    UnknownPreset(String),
    #[error("generic perturbation has no concrete Clifford data for {0}")]
    GenericPsi(&'static str),
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
