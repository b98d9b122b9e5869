use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Higgs field vanishes (|Φ| = {norm:e}); longitudinal split undefined")]
    ZeroHiggs { norm: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field arrays do not conform to the grid: {0}")]
    DimMismatch(String),

    #[error("ball of radius {radius} around {center:?} does not fit in the domain")]
    BallOutOfDomain { center: [f64; 3], radius: f64 },

    #[error("perturbation does not conform to the configuration: {0}")]
    NonconformingPerturbation(String),

    #[error("gauge field does not conform to the configuration: {0}")]
    NonconformingGauge(String),

    #[error("operation requires a {0} grid")]
    WrongBoundary(&'static str),

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("Higgs field too small on the sphere (min |Φ| = {min_norm:.4}, need > 0.5)")]
    HiggsVanishesOnSphere { min_norm: f64 },

    #[error("rescaling window does not fit in the domain")]
    WindowOutOfDomain,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("snapshot has bad magic bytes")]
    BadMagic,

    #[error("snapshot is truncated")]
    TruncatedFile,

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
