//! File formats, command line, and threaded execution for `mhdlab-core`.
//!
//! - [`config`]: flat `section.key = value` run configuration.
//! - [`snapshot`]: the binary `MHDS` snapshot format.
//! - [`report`]: CSV tables; [`svg`]: line plots.
//! - [`exec`]: a rayon-backed executor for sweep members.
//! - [`cli`]: the `mhdlab` subcommands.

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod report;
pub mod snapshot;
pub mod svg;

pub use config::RunConfig;
pub use error::{ConfigError, LabError, SnapshotError};
pub use exec::RayonExecutor;
pub use snapshot::SnapshotFile;
