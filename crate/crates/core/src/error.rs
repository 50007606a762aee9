use std::path::PathBuf;

use thiserror::Error;

use crate::dynamics::DiagnosticsRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("requested {requested} eigenpairs but the problem has dimension {dimension}")]
    TooManyModes { requested: usize, dimension: usize },

    #[error("eigensolver did not converge: {converged} of {requested} pairs after a Krylov space of dimension {krylov_dim}")]
    NotConverged {
        requested: usize,
        converged: usize,
        krylov_dim: usize,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("field has {found} entries, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("fractional exponent {0} outside the supported range [-2, 3]")]
    ExponentOutOfRange(f64),

    #[error(
        "CFL condition violated: dt * |u|_inf / h = {ratio:.3} > 0.5; try dt <= {suggested_dt:e}"
    )]
    Cfl { ratio: f64, suggested_dt: f64 },

    #[error("blow-up detected at t = {time}: {reason}")]
    BlowUp {
        time: f64,
        reason: String,
        last_good: Box<Option<DiagnosticsRecord>>,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
