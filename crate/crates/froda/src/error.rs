//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, FrodaError>;

#[derive(Debug, Error)]
pub enum FrodaError {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("requested {requested} components but the data only attains rank {attainable}")]
    RankDeficient { requested: usize, attainable: usize },

    #[error("zero variance: the data has no principal directions")]
    ZeroVariance,

    #[error("singular least-squares system; supply a positive ridge")]
    SingularSystem,

    #[error("non-finite value encountered{}", location_suffix(.location))]
    NonFinite { location: Option<String> },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bad model file: {0}")]
    BadModelFile(String),

    #[error("class {0} absent from dataset")]
    ClassAbsent(usize),

    #[error("protocol class lists overlap on class {0}")]
    ProtocolOverlap(usize),

    #[error("label {label} out of range 1..={max}")]
    LabelOutOfRange { label: usize, max: usize },

    #[error("empty grid")]
    EmptyGrid,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn location_suffix(location: &Option<String>) -> String {
    match location {
        Some(loc) => format!(" in {loc}"),
        None => String::new(),
    }
}

impl FrodaError {
    pub fn non_finite(location: impl Into<String>) -> Self {
        FrodaError::NonFinite {
            location: Some(location.into()),
        }
    }
}
