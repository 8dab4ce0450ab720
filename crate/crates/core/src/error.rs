use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for {context} (size {size})")]
    IndexOutOfRange {
        context: String,
        index: usize,
        size: usize,
    },

    #[error("invalid rational literal {0:?}")]
    BadRational(String),

    #[error("malformed model: {0}")]
    MalformedModel(String),

    #[error("unknown class label {0:?}")]
    UnknownClass(String),

    #[error("Nakajima index must be positive in a Fock word, got {0}")]
    NonPositiveIndex(i64),

    #[error("class space mismatch: {0}")]
    ClassSpace(String),

    #[error("weight {requested} exceeds cap {cap}; raise it with --max-weight")]
    WeightCap { requested: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("vector is not homogeneous: {0}")]
    Inhomogeneous(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid fiber data: {0}")]
    InvalidFiber(String),

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
