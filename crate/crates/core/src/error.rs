use thiserror::Error;

use crate::conic::SolveStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid convex set: {0}")]
    InvalidSet(String),

    #[error("malformed cone block: {0}")]
    MalformedBlock(String),

    #[error("conic solve ended with status {status:?} ({context})")]
    Solver {
        status: SolveStatus,
        context: String,
    },

    #[error("traversal time of segment {segment} collapsed (S = {value:e})")]
    DegenerateTime { segment: usize, value: f64 },

    #[error("polygonal initialization produced coincident points at index {index}")]
    DegenerateInitialization { index: usize },

    #[error("point {index} is {distance:e} away from the segment line")]
    NotOnLine { index: usize, distance: f64 },

    #[error("progress profile is not monotone: {0}")]
    NonMonotoneProfile(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported file version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn solver(status: SolveStatus, context: impl Into<String>) -> Self {
        Error::Solver {
            status,
            context: context.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
