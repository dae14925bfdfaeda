use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input falls outside the domain of the operation.
    #[error("invalid {param} = {value}: {reason}")]
    Domain {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Root finding could not bracket the requested target.
    #[error("no solution for {what} = {target} in bracket [{lo}, {hi}] (achievable [{achievable_lo}, {achievable_hi}])")]
    NoSolution {
        what: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
        achievable_lo: f64,
        achievable_hi: f64,
    },

    /// Inputs are individually valid but do not fit together.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid netlist: {0}")]
    Netlist(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(param: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            param,
            value,
            reason,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(param: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(param, value, "must be finite and > 0"))
    }
}
