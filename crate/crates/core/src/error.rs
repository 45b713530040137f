use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the sampling pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("point cloud contains no points")]
    EmptyCloud,

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("invalid neighbor count k={k} for {n} points")]
    InvalidK { k: usize, n: usize },

    #[error("invalid sample count M={m} for {n} points")]
    InvalidM { m: usize, n: usize },

    #[error("voxel cell edge must be positive and finite, got {0}")]
    InvalidCell(f64),

    #[error("temperature must be positive and finite, got {0}")]
    InvalidTau(f64),

    #[error("momentum factor must lie in (0, 1), got {0}")]
    InvalidGamma(f64),

    #[error("weights file format error: {0}")]
    Format(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("indexing mode {mode} is not compatible with {map} attention maps")]
    IncompatibleMode {
        mode: &'static str,
        map: &'static str,
    },

    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot select {m} points from bins holding {available}")]
    Infeasible { m: usize, available: usize },

    #[error("unknown shape generator `{0}`")]
    UnknownGenerator(String),

    #[error("edge mask missing or unusable: {0}")]
    MissingMask(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
