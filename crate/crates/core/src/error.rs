use thiserror::Error;

/// Largest node count accepted by the exhaustive landscape operations.
pub const MAX_EXHAUSTIVE_NODES: usize = 26;

#[derive(Debug, Error)]
pub enum OimError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: u64, limit: u64 },

    #[error("exhaustive sweep needs n <= {MAX_EXHAUSTIVE_NODES}, graph has n = {n}")]
    TooLarge { n: usize },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {0:e})")]
    Asymmetric(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, OimError>;

impl OimError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        OimError::Io { path: path.as_ref().display().to_string(), source }
    }
}
