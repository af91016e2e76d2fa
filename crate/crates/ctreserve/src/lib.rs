//! Files, reports and the command line around `ctreserve-core`.
//!
//! - [`csv`]: triangle CSV parsing and writing.
//! - [`parallel`]: multi-threaded bootstrap driver with thread-count
//!   independent results.
//! - [`compare`]: parametric quantiles, method comparison tables and zero-mass
//!   diagnostics.
//! - [`report`]: JSON, CSV and text reports with a run manifest.
//! - [`cli`]: the `ctreserve` command.

pub mod cli;
pub mod compare;
pub mod csv;
pub mod parallel;
pub mod report;

pub use ctreserve_core as core;

use std::path::PathBuf;

use ctreserve_core::analytics::AnalyticsError;
use ctreserve_core::bootstrap::BootstrapError;
use ctreserve_core::chain_ladder::ChainLadderError;
use ctreserve_core::TriangleError;

/// Exit status for invalid input or configuration.
pub const EXIT_INVALID: u8 = 2;
/// Exit status for failures while running or writing output.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Input { path: String, source: csv::CsvError },
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    ChainLadder(#[from] ChainLadderError),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Pool(#[from] parallel::PoolError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Input { .. }
            | Error::Triangle(_)
            | Error::ChainLadder(_)
            | Error::Bootstrap(_)
            | Error::Analytics(_)
            | Error::Config(_) => EXIT_INVALID,
            Error::Pool(_) | Error::Io { .. } | Error::Json(_) => EXIT_FAILURE,
        }
    }

    /// Short machine-readable category used on stderr.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input { .. } | Error::Triangle(_) => "invalid_triangle",
            Error::ChainLadder(_) => "estimation",
            Error::Bootstrap(_) | Error::Config(_) => "invalid_config",
            Error::Analytics(_) => "invalid_analytics",
            Error::Pool(_) => "threads",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}
