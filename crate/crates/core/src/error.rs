use thiserror::Error;

use crate::estimation::Space;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("unsupported moments: {0}")]
    UnsupportedMoments(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "{space} MLE did not converge after {iterations} iterations{}",
        if *condition1_violated { " (Condition 1 violated: uniqueness not guaranteed)" } else { "" }
    )]
    Convergence {
        space: Space,
        iterations: usize,
        loglik_trace: Vec<f64>,
        condition1_violated: bool,
    },

    #[error("degenerate likelihood: variance of group {group} about the fitted mean is zero")]
    DegenerateLikelihood { group: usize },

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("bootstrap unstable: {failed} of {total} resamples failed to estimate")]
    BootstrapInstability { failed: usize, total: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: row {row}: {message}")]
    Ingest { path: String, row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ParameterDomain(_) | Error::UnsupportedMoments(_) => 2,
            Error::InsufficientData(_) | Error::Ingest { .. } | Error::Io(_) => 3,
            Error::Convergence { .. }
            | Error::DegenerateLikelihood { .. }
            | Error::DegenerateVariance(_)
            | Error::BootstrapInstability { .. } => 4,
        }
    }
}
