//! Reproducible experiments: every report is a pure function of `(config, seed)`.
//!
//! Work is split into fixed batches, each with its own random stream derived from
//! `(experiment, parameter index, batch)`, and results are reduced in batch order, so the
//! output does not depend on the number of worker threads.

pub mod agreement;
pub mod convergence;
pub mod coupling;
pub mod gibbs;
pub mod mingap;
pub mod scaling;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::EnsembleError;
use crate::exact::ExactError;
use crate::limit::LimitError;
use crate::sampling::SamplingError;

pub use agreement::{empirical_tv, uniform_law, SamplerKind};
pub use convergence::{run_convergence, ConvergenceConfig};
pub use coupling::{random_ordered_pair, run_coupling_test, CouplingConfig};
pub use gibbs::{gibbs_invariance, run_gibbs_invariance, GibbsConfig, GibbsOutcome};
pub use mingap::{run_mingap, MingapConfig};
pub use scaling::{rescale_ensemble, RescaleSpec, RescaledCurves, ScalingSpec};

pub const SCHEMA_VERSION: u32 = 1;

// Stream keys per experiment.
pub(crate) const KEY_CONVERGENCE: u64 = 1;
pub(crate) const KEY_COUPLING: u64 = 2;
pub(crate) const KEY_MINGAP: u64 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("boundary data at T = {t} admits no ensemble")]
    InfeasibleScale { t: i64 },
    #[error("ensemble window [{t0}, {t1}] does not contain a symmetric interval around 0")]
    WindowTooSmall { t0: i64, t1: i64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// The structured summary of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub statistics: Vec<serde_json::Value>,
    pub summary: serde_json::Value,
    /// `None` when the run had too little data to judge.
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// A CSV side file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

/// A report and its side files.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub tables: Vec<CsvTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Convergence,
    Coupling,
    Gibbs,
    Mingap,
}

/// Config document: the experiment to run plus one optional section per experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default)]
    pub coupling: CouplingConfig,
    #[serde(default)]
    pub gibbs: GibbsConfig,
    #[serde(default)]
    pub mingap: MingapConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn run(&self, seed: u64) -> Result<ExperimentOutput, ExperimentError> {
        match self.experiment {
            ExperimentKind::Convergence => run_convergence(&self.convergence, seed),
            ExperimentKind::Coupling => run_coupling_test(&self.coupling, seed),
            ExperimentKind::Gibbs => run_gibbs_invariance(&self.gibbs),
            ExperimentKind::Mingap => run_mingap(&self.mingap, seed),
        }
    }
}

/// Formats a float for CSV output with full round-trip precision.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
