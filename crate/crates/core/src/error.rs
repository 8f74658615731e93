use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An invariant on a configuration value was violated. `field` is the
    /// dotted config path (e.g. `payoff.lambda`).
    #[error("{field} {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown aspect `{0}`")]
    UnknownAspect(String),

    #[error("payoff vector has no entry for aspect `{0}`")]
    MissingPayoff(String),

    #[error("loss aversion undefined for symmetric family")]
    LossAversionUndefined,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed axis `{axis}`: {reason}")]
    Axis { axis: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status for this error: 2 for anything caused by the
    /// configuration or arguments, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Parse { .. }
            | Error::ConfigRead { .. }
            | Error::UnknownAspect(_)
            | Error::MissingPayoff(_)
            | Error::LossAversionUndefined
            | Error::InvalidArgument(_)
            | Error::Axis { .. } => 2,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}
