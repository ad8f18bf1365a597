use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {p} at level {level} outside (0, 1/2]")]
    InvalidProbability { level: i64, p: f64 },

    #[error("degenerate environment: p(j) = 1/2 at every probed level")]
    DegenerateEnvironment,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("density diverges at support endpoint v = {v}")]
    Singularity { v: f64 },

    #[error("need at least {needed} usable points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("missing or unreadable manifest at {0}")]
    MissingManifest(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
