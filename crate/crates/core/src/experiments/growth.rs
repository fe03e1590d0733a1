use serde::Serialize;

use super::report::{ExperimentReport, Metadata, ESTIMATOR_RATIONALE};
use super::stats::{log_mean_exp, mean_stderr};
use crate::ensembles::{sample, EnsembleSpec};
use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::reference::{free_convolve, mde_density, DensityOptions, MdeProblem, ReferenceMeasure};
use crate::rng::derive_seed;
use crate::spectral::{eigenvalues, sign_log_abs_det_from_eigs};

/// Deterministic measure the spectrum of the *unshifted* model approaches.
pub fn reference_for(spec: &EnsembleSpec) -> Result<ReferenceMeasure> {
    match spec {
        EnsembleSpec::Wigner { .. }
        | EnsembleSpec::ErdosRenyi { .. }
        | EnsembleSpec::DRegular { .. }
        | EnsembleSpec::Band { .. }
        | EnsembleSpec::OutlierCounterexample { .. }
        | EnsembleSpec::KernelCounterexample { .. } => Ok(ReferenceMeasure::semicircle(1.0)),
        EnsembleSpec::Covariance { rows, cols, .. } => {
            let gamma = *rows as f64 / *cols as f64;
            if gamma > 1.0 {
                return Err(Error::spec("covariance reference needs rows <= cols"));
            }
            ReferenceMeasure::marchenko_pastur(gamma)
        }
        EnsembleSpec::VarianceProfile { mean, variances } => {
            let s: Vec<f64> = variances.iter().flatten().copied().collect();
            let prob = MdeProblem::new(mean.clone(), s)?;
            Ok(mde_density(&prob, DensityOptions::default())?.measure)
        }
        EnsembleSpec::BlockGaussian { means, variances, goe_diagonal, .. } => {
            let profiles: Vec<Vec<f64>> = variances
                .iter()
                .map(|v| {
                    let n = v.len();
                    let mut flat: Vec<f64> = v.iter().flatten().copied().collect();
                    if *goe_diagonal {
                        for i in 0..n {
                            flat[i * n + i] *= 2.0;
                        }
                    }
                    flat
                })
                .collect();
            let prob = MdeProblem::block(means, &profiles)?;
            Ok(mde_density(&prob, DensityOptions::default())?.measure)
        }
        EnsembleSpec::FreeAddition { a_diag, b_diag, .. } => {
            let n = a_diag.len();
            let a = ReferenceMeasure::atomic(a_diag.clone(), vec![1.0; n])?;
            let b = ReferenceMeasure::atomic(b_diag.clone(), vec![1.0; n])?;
            free_convolve(&a, &b)
        }
        EnsembleSpec::LongRangeShift { base, .. } => reference_for(base),
    }
}

/// Growth-rate oracle `∫ log|λ - E| dμ` for the spec's own shift.
pub fn growth_oracle(spec: &EnsembleSpec) -> Result<f64> {
    let (base, e) = spec.split_shift();
    reference_for(&base)?.try_log_potential(e)
}

/// One sample's determinant data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    pub sign: i8,
    pub log_abs_det: f64,
}

/// `(sign, log|det|)` for `samples` independent draws. Sample `k` uses seed
/// `derive_seed(seed, tag, k)`, so earlier samples do not change when the
/// sample count grows.
pub fn sample_log_dets(spec: &EnsembleSpec, samples: usize, seed: u64, tag: &str) -> Result<Vec<SampleRecord>> {
    spec.validate()?;
    let out = map_indexed(samples, |k| -> Result<SampleRecord> {
        let s = derive_seed(seed, tag, k as u64);
        let h = sample(spec, s)?;
        let eig = eigenvalues(&h)?;
        let (sign, log_abs_det) = sign_log_abs_det_from_eigs(&eig, h.frobenius());
        Ok(SampleRecord { index: k, seed: s, sign, log_abs_det })
    });
    out.into_iter().collect()
}

/// Both growth estimators over a set of `log|det|` values of `dim x dim`
/// matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthEstimates {
    pub mean_of_logs: f64,
    pub mean_of_logs_stderr: f64,
    pub log_mean_exp: f64,
    pub log_mean_exp_stderr: f64,
    pub used: usize,
    pub excluded: usize,
}

impl GrowthEstimates {
    pub fn from_log_dets(logs: &[f64], dim: usize) -> Self {
        let finite: Vec<f64> = logs.iter().copied().filter(|l| l.is_finite()).collect();
        let nf = dim as f64;
        let (m, se) = mean_stderr(&finite);
        let (l, lse) = log_mean_exp(&finite);
        Self {
            mean_of_logs: m / nf,
            mean_of_logs_stderr: se / nf,
            log_mean_exp: l / nf,
            log_mean_exp_stderr: lse / nf,
            used: finite.len(),
            excluded: logs.len() - finite.len(),
        }
    }

    pub fn annotate(&self, md: Metadata) -> Metadata {
        let mut md = md
            .value("mean_of_logs", self.mean_of_logs)
            .value("mean_of_logs_stderr", self.mean_of_logs_stderr)
            .value("log_mean_exp", self.log_mean_exp)
            .value("log_mean_exp_stderr", self.log_mean_exp_stderr)
            .note(ESTIMATOR_RATIONALE);
        md.excluded = self.excluded;
        if self.excluded > 0 {
            md = md.note(format!("{} samples with a zero eigenvalue were excluded", self.excluded));
        }
        md
    }
}

/// Minimum sample count accepted by [`estimate_det_growth`].
pub const MIN_GROWTH_SAMPLES: usize = 30;

/// Monte Carlo estimate of `(1/N) log E|det(H_N - E)|` against the
/// log-potential oracle. The normalization is the matrix side (`p` for the
/// covariance model).
pub fn estimate_det_growth(spec: &EnsembleSpec, samples: usize, seed: u64, tolerance: f64) -> Result<ExperimentReport> {
    if samples < MIN_GROWTH_SAMPLES {
        return Err(Error::param(format!("need at least {MIN_GROWTH_SAMPLES} samples, got {samples}")));
    }
    let oracle = growth_oracle(spec)?;
    let (records, est) = growth_samples(spec, samples, seed)?;
    drop(records);
    let md = est.annotate(Metadata::for_spec(spec, seed));
    Ok(ExperimentReport::within(
        "detgrowth",
        est.mean_of_logs,
        est.mean_of_logs_stderr,
        oracle,
        tolerance,
        samples,
        spec.dim(),
        md,
    ))
}

/// Per-sample records and both estimators.
pub fn growth_samples(spec: &EnsembleSpec, samples: usize, seed: u64) -> Result<(Vec<SampleRecord>, GrowthEstimates)> {
    let records = sample_log_dets(spec, samples, seed, "detgrowth")?;
    let logs: Vec<f64> = records.iter().map(|r| r.log_abs_det).collect();
    let est = GrowthEstimates::from_log_dets(&logs, spec.dim());
    Ok((records, est))
}
