use serde::Serialize;

use super::growth::sample_log_dets;
use super::report::{ExperimentReport, Metadata};
use super::stats::{hill_index, log_mean_exp, max_share};
use crate::ensembles::{EnsembleSpec, EntryDistribution};
use crate::error::{Error, Result};

/// Max-sample share at or above which a run is classified heavy.
pub const HEAVY_SHARE: f64 = 0.35;
/// Hill tail index of `|det|^p` below which a run is classified heavy.
pub const HEAVY_HILL: f64 = 1.0;
/// Largest dimension accepted by [`moment_transition`].
pub const MOMENT_MAX_N: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    Stable,
    Heavy,
}

/// Diagnostics of the sample mean of `|det H_N|^p`.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub p_exp: f64,
    pub n: usize,
    pub samples: usize,
    /// `log` of the running mean of `|det|^p` at sample counts `1, 2, 4, …, samples`.
    pub running_log_mean: Vec<(usize, f64)>,
    pub max_share: f64,
    pub hill_index: f64,
    pub hill_k: usize,
    pub class: TailClass,
    pub finite_moment: bool,
    pub report: ExperimentReport,
}

/// Samples `|det H_N|^p` for a Wigner matrix with the given entry law and
/// classifies the running mean. A run is heavy when the largest sample carries
/// at least [`HEAVY_SHARE`] of the total or the Hill index of the top `√samples`
/// values is below [`HEAVY_HILL`].
pub fn moment_transition(p_exp: f64, dist: EntryDistribution, n: usize, samples: usize, seed: u64) -> Result<MomentReport> {
    if !(p_exp >= 1.0) {
        return Err(Error::param(format!("p_exp must be at least 1, got {p_exp}")));
    }
    if n > MOMENT_MAX_N {
        return Err(Error::param(format!("N must be at most {MOMENT_MAX_N}, got {n}")));
    }
    if samples < 2 {
        return Err(Error::param("need at least 2 samples"));
    }
    let spec = EnsembleSpec::wigner(n, dist, 0.0);
    let records = sample_log_dets(&spec, samples, seed, "moments")?;
    let logs: Vec<f64> = records.iter().map(|r| p_exp * r.log_abs_det).filter(|l| l.is_finite()).collect();
    let excluded = samples - logs.len();

    let mut running = Vec::new();
    let mut m = 1;
    while m < logs.len() {
        running.push((m, log_mean_exp(&logs[..m]).0));
        m *= 2;
    }
    running.push((logs.len(), log_mean_exp(&logs).0));

    let share = max_share(&logs);
    let k = ((logs.len() as f64).sqrt() as usize).max(2);
    let hill = hill_index(&logs, k);
    let class = if share >= HEAVY_SHARE || hill < HEAVY_HILL { TailClass::Heavy } else { TailClass::Stable };
    let finite_moment = dist.has_moment(2.0 * p_exp);

    let mut md = Metadata::for_spec(&spec, seed)
        .value("p_exp", p_exp)
        .value("hill_index", hill)
        .value("log_mean", running.last().map(|r| r.1).unwrap_or(f64::NAN))
        .note(format!("heavy when max share >= {HEAVY_SHARE} or Hill index < {HEAVY_HILL}"));
    md.excluded = excluded;
    let expected_share = if finite_moment { 0.0 } else { 1.0 };
    let mut report = ExperimentReport::within("moments", share, f64::NAN, expected_share, f64::NAN, samples, n, md);
    report.tolerance = HEAVY_SHARE;
    report.passed = (class == TailClass::Heavy) != finite_moment;
    Ok(MomentReport {
        p_exp,
        n,
        samples,
        running_log_mean: running,
        max_share: share,
        hill_index: hill,
        hill_k: k,
        class,
        finite_moment,
        report,
    })
}
