use thiserror::Error;

/// Errors produced by the path solver and its supporting modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("design matrix has rank {rank} < {cols} columns; use ridge augmentation")]
    RankDeficientDesign { rank: usize, cols: usize },

    #[error("lambda {lambda} is below the computed range (path ends at {lowest})")]
    OutOfRange { lambda: f64, lowest: f64 },

    #[error("no row with handle {0}")]
    InvalidHandle(usize),

    #[error("{0}")]
    Unsupported(&'static str),

    #[error("solver did not converge after {sweeps} sweeps (last change {last_change:e})")]
    NotConverged { sweeps: usize, last_change: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
