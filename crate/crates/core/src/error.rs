use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid resolution {0}: need n >= 1")]
    InvalidResolution(usize),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("restriction {0:?} is not supported here")]
    InvalidRestriction(crate::spaces::Restriction),

    #[error("spaces are defined on different meshes")]
    MeshMismatch,

    #[error("degenerate space: {0}")]
    DegenerateSpace(String),

    #[error("alpha must differ from 1 (got {0})")]
    ParameterSingularity(f64),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("factorization failed ({context}): {reason}")]
    Factorization { context: String, reason: String },

    #[error("solve did not meet its residual contract ({context}): relative residual {residual:.3e} > {tolerance:.1e}")]
    Residual {
        context: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
