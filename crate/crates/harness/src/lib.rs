//! Monte Carlo experiments, presets, result files and reference oracles for
//! IRS-assisted secrecy-rate maximization.
//!
//! The numerical work lives in [`irs_secrecy_core`]; this crate adds the
//! pieces that need `std`: parallel trial execution, JSON experiment specs,
//! CSV and JSON-lines output, and dense cross-checks against `nalgebra`.

use std::path::PathBuf;

pub mod experiment;
pub mod oracle;
pub mod output;
pub mod presets;
pub mod spec;

pub use experiment::{run_trials, ResultRow, RunOutput, RunSettings, SummaryRow, TraceRow};
pub use spec::{ExperimentKind, ExperimentSpec, OutputFormat, SolverKind};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] irs_secrecy_core::Error),
}
