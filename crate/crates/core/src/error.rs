use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the coverage toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid resolution {resolution} is too coarse for sensing radius {radius} (need <= r_s/5)")]
    ResolutionTooCoarse { resolution: f64, radius: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("subarea areas sum to {sum}, field area is {field}")]
    InconsistentPartition { sum: f64, field: f64 },

    #[error("gaussian deployment acceptance rate {rate:.4} is below 1%; sigmas are degenerate for this field")]
    DegenerateGaussian { rate: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input (config or arguments) rather than
    /// failures while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidField(_)
                | Error::InvalidArgument(_)
                | Error::ResolutionTooCoarse { .. }
                | Error::Json { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
