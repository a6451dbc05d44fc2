//! Configuration-driven front end: single runs, parameter sweeps, the
//! verification suite and the artifacts they write.
//!
//! Exit-code contract of the binary: `0` success, `1` configuration or other
//! error, `2` an assertion-class check failed its tolerance, `3` the
//! integration produced non-finite values.

mod config;
mod report;
mod run;
mod svg;
mod sweep;
mod verify;

use std::path::{Path, PathBuf};

pub use config::{
    AccumulatorSection, AnalysisSection, CheckSection, IntegratorSection, OutputSection, ProblemSection, RunConfig,
    ScheduleKind, ScheduleSection,
};
pub use report::{
    CheckOutcome, ChecksSection, ConvergenceSection, EnergySection, IntegralSummary, WeightedDecaySummary, RateSection, RunInfo,
    RunReport, SummaryRow,
};
pub use run::{analyze, execute, run, run_to_dir, RunOutcome, RunStatus};
pub use svg::decay_plot;
pub use sweep::{sweep, sweep_file, SweepConfig, SweepGrid, SweepOutcome};
pub use verify::{Criterion, CriterionResult, Group, Suite, Tolerances, VerifyReport};

use crate::analysis::AnalysisError;
use crate::dynamics::DynamicsError;
use crate::model::ModelError;

/// Environment variable overriding every output directory.
pub const OUT_ENV: &str = "VANISHDAMP_OUT";

/// `VANISHDAMP_OUT` if set, else `configured`.
pub fn output_dir(configured: &Path) -> PathBuf {
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => configured.to_path_buf(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid value for `{key}`{}: {reason}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Invalid { key: String, reason: String, line: Option<usize> },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl CliError {
    pub(crate) fn invalid(key: &str, reason: String) -> Self {
        CliError::Invalid { key: key.into(), reason, line: None }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn with_line(self, text: &str) -> Self {
        match self {
            CliError::Invalid { key, reason, line: None } => {
                let line = config::locate_key(text, &key);
                CliError::Invalid { key, reason, line }
            }
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Dynamics(DynamicsError::NonFinite { .. }) => 3,
            _ => 1,
        }
    }
}
