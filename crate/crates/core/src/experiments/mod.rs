//! Configuration, parameter scans, output files and the command-line front end.

mod cli;
mod commands;
mod config;
mod output;
mod scan;
mod selftest;

pub use cli::{execute, run, Invocation, RunReport, OUT_ENV};
pub use commands::{run_command, CommandOutput, Subcommand};
pub use config::{
    BursterConfig, Config, GlobalConfig, MapConfig, MapKind, Model1dConfig, ProfileConfig, ProfileKind, RunConfig,
    SaddleConfig, ScanConfig,
};
pub use output::{short_hash, spec_echo, write_outputs, Cell, OutputPaths, Table};
pub use scan::{run_scan, Axis, ScanPoint, ScanRecord, ScanResult, ScanSpec, ScanTarget, Spacing, Status};
pub use selftest::{selftest_cases, SelftestCase};

use crate::analysis::AnalysisError;
use crate::burster::{BursterError, IntegrationError};
use crate::maps::MapError;
use std::path::PathBuf;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("analysis failed: {0}")]
    Analysis(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Usage(_) => EXIT_CONFIG,
            _ => EXIT_ANALYSIS,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.into(),
            source,
        }
    }
}

// Bad parameters are configuration errors; everything else happened while
// analysing a valid setup.
impl From<MapError> for ExperimentError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::InvalidParameter { .. } | MapError::ZeroMu => ExperimentError::Config(e.to_string()),
            other => ExperimentError::Analysis(other.to_string()),
        }
    }
}

impl From<AnalysisError> for ExperimentError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidInput { .. } => ExperimentError::Config(e.to_string()),
            AnalysisError::Map(m) => m.into(),
            other => ExperimentError::Analysis(other.to_string()),
        }
    }
}

impl From<BursterError> for ExperimentError {
    fn from(e: BursterError) -> Self {
        match e {
            BursterError::InvalidParameter { .. } => ExperimentError::Config(e.to_string()),
            other => ExperimentError::Analysis(other.to_string()),
        }
    }
}

impl From<IntegrationError> for ExperimentError {
    fn from(e: IntegrationError) -> Self {
        match e {
            IntegrationError::Invalid(_) => ExperimentError::Config(e.to_string()),
            other => ExperimentError::Analysis(other.to_string()),
        }
    }
}
