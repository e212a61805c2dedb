use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to map errors onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments, shapes or configuration supplied by the caller.
    Usage,
    /// A numerical precondition failed (conditioning, convergence, NaN).
    Numerical,
    /// Filesystem or file-format problem.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("linalg: invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("linalg: shape mismatch in {op}: {lhs:?} vs {rhs:?}")]
    ShapeMismatch { op: &'static str, lhs: (usize, usize), rhs: (usize, usize) },

    #[error("linalg: SVD did not converge after {sweeps} sweeps (residual {residual:e})")]
    SvdNonConvergence { sweeps: usize, residual: f64 },

    #[error("linalg: rank deficient input, column {column} is numerically dependent")]
    RankDeficient { column: usize },

    #[error("linalg: singular or ill-conditioned system (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("grassmann: basis is not orthonormal (|XᵀX - I|_F = {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("grassmann: tangent vector is not horizontal (|BᵀΔ|_F = {defect:e})")]
    NotHorizontal { defect: f64 },

    #[error("grassmann: target outside logarithm neighborhood (condition estimate {condition:e})")]
    OutsideLogNeighborhood { condition: f64 },

    #[error("grassmann: velocity is attached to a different base point")]
    BaseMismatch,

    #[error(
        "itsgm: sample {index} outside logarithm neighborhood of the reference \
         (smallest singular value of the cross product {min_singular_value:e})"
    )]
    SampleOutsideNeighborhood { index: usize, min_singular_value: f64 },

    #[error("pod: {0}")]
    Pod(String),

    #[error("interp: {0}")]
    Interpolation(String),

    #[error("samples: {0}")]
    Samples(String),

    #[error("ga: fitness returned NaN for genes {genes:?}")]
    NanFitness { genes: Vec<f64> },

    #[error("ga: {0}")]
    GaConfig(String),

    #[error("toyflow: {0}")]
    Toy(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidMatrix(_)
            | Error::ShapeMismatch { .. }
            | Error::BaseMismatch
            | Error::Samples(_)
            | Error::Pod(_)
            | Error::GaConfig(_)
            | Error::Toy(_) => ErrorKind::Usage,
            Error::Format { .. } | Error::Io { .. } => ErrorKind::Io,
            Error::Stage { source, .. } => source.kind(),
            _ => ErrorKind::Numerical,
        }
    }

    /// Wraps the error with a pipeline stage tag such as `"spatial"`.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Error {
        Error::Format { path: path.into(), message: message.into() }
    }
}
