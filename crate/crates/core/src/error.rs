use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} out of domain: {value} ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("non-finite input for {0}")]
    NonFinite(&'static str),

    #[error("steady-state solver found no positive root (residual {residual:e})")]
    NoPositiveRoot { residual: f64 },

    #[error("probe response has a pole at delta = {delta}")]
    Pole { delta: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Convergence {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("no resonance feature in window [{lo}, {hi}] Hz")]
    NoPeak { lo: f64, hi: f64 },

    #[error("constraint evaluation failed at m_a = {mass:e} eV: {source}")]
    AtMass {
        mass: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("constraint curve is not monotone at m_a = {mass:e} eV")]
    NotMonotone { mass: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("csv schema mismatch in {path}: {reason}")]
    Schema { path: PathBuf, reason: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            reason,
        }
    }

    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) | Error::Schema { .. } => 2,
            _ => 1,
        }
    }
}

pub(crate) fn ensure_finite(what: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
