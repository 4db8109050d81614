use std::io;
use std::path::PathBuf;

use mhdlab_core::{DataError, ExperimentError, LpError, SolveError, SpectralError};
use thiserror::Error;

/// A configuration value out of range, naming the offending key.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Errors of the snapshot format.
#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("bad magic bytes (expected MHDS)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("header is truncated")]
    Truncated,
    #[error("payload holds {found} bytes, header implies {expected}")]
    PayloadLength { expected: usize, found: usize },
    #[error("field count {0} does not hold two vector fields")]
    FieldCount(u32),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Anything a command can fail with.
#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Snapshot {
        path: PathBuf,
        source: SnapshotError,
    },
    #[error(transparent)]
    Format(#[from] SnapshotError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl LabError {
    pub fn file(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::File { path, source }
    }

    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            _ => 1,
        }
    }

    /// Time at which a run tripped a guard, if that is what failed.
    pub fn trip_time(&self) -> Option<f64> {
        match self {
            LabError::Solve(e) => e.time(),
            LabError::Experiment(
                ExperimentError::Member { source: e, .. }
                | ExperimentError::Reference(e)
                | ExperimentError::Solve(e),
            ) => e.time(),
            _ => None,
        }
    }
}
