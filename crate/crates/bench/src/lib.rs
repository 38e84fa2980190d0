//! Benchmark harness for the sparse inference engine: density, batch and
//! worker sweeps with plot-ready CSV output.

mod config;
mod report;
mod runner;

pub use config::{BenchConfig, DEFAULT_DENSITIES};
pub use report::{median, summarize, write_density_csv, write_timing_csv, SummaryRow};
pub use runner::{run_bench, run_density_study, BenchReport, DensityStudy, TimingRow};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    /// Invalid configuration; the CLI exits with status 2.
    #[error("usage: {0}")]
    Usage(String),

    #[error("{point}: {source}")]
    Run {
        point: String,
        #[source]
        source: sparse_infer::Error,
    },

    #[error("{context}: {source}")]
    Setup {
        context: String,
        #[source]
        source: sparse_infer::Error,
    },

    #[error("writing {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: csv::Error,
    },
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
