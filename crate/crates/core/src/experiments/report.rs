use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::ensembles::EnsembleSpec;
use crate::error::Result;

/// Why the mean-of-logs value is the one compared against the oracle.
pub const ESTIMATOR_RATIONALE: &str = "estimate = mean of (1/N) log|det| over samples, which concentrates at \
     desk scale; log_mean_exp = (1/N) log of the sample mean of |det|, the annealed quantity, reported alongside";

/// Outcome of one Monte Carlo experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub estimate: f64,
    pub stderr: f64,
    pub oracle: f64,
    pub tolerance: f64,
    pub n_samples: usize,
    pub n_dimension: usize,
    pub passed: bool,
    pub metadata: Metadata,
}

/// Provenance and secondary values of a report.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<EnsembleSpec>,
    pub spec_hash: String,
    pub seed: u64,
    /// Samples dropped because a determinant was exactly zero.
    pub excluded: usize,
    /// Secondary estimators and diagnostics, keyed by name.
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// Only filled in when timing is requested; left out of reproducible output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Metadata {
    pub fn for_spec(spec: &EnsembleSpec, seed: u64) -> Self {
        Self { spec_hash: spec.hash(), spec: Some(spec.clone()), seed, ..Default::default() }
    }

    pub fn for_tag(tag: &str, seed: u64) -> Self {
        Self { spec_hash: crate::output::short_hash(tag.as_bytes()), seed, ..Default::default() }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

impl ExperimentReport {
    /// Builds a report whose pass flag is `|estimate - oracle| <= tolerance`.
    pub fn within(name: &str, estimate: f64, stderr: f64, oracle: f64, tolerance: f64, n_samples: usize, n_dimension: usize, metadata: Metadata) -> Self {
        Self {
            name: name.to_string(),
            estimate,
            stderr,
            oracle,
            tolerance,
            n_samples,
            n_dimension,
            passed: (estimate - oracle).abs() <= tolerance,
            metadata,
        }
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.metadata.values.get(key).copied()
    }

    /// One CSV row: spec hash, N, samples, both estimators, stderrs, oracle, pass.
    pub fn csv_row(&self) -> ReportRow {
        ReportRow {
            name: self.name.clone(),
            spec_hash: self.metadata.spec_hash.clone(),
            n: self.n_dimension,
            samples: self.n_samples,
            estimate: self.estimate,
            stderr: self.stderr,
            log_mean_exp: self.value("log_mean_exp"),
            log_mean_exp_stderr: self.value("log_mean_exp_stderr"),
            oracle: self.oracle,
            tolerance: self.tolerance,
            passed: self.passed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub spec_hash: String,
    pub n: usize,
    pub samples: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub log_mean_exp: Option<f64>,
    pub log_mean_exp_stderr: Option<f64>,
    pub oracle: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Writes report rows as CSV.
pub fn write_report_csv<W: Write>(w: W, reports: &[ExperimentReport]) -> Result<()> {
    let rows: Vec<ReportRow> = reports.iter().map(|r| r.csv_row()).collect();
    crate::output::write_csv_rows(w, &rows)
}
