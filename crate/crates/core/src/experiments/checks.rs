use super::growth::{reference_for, sample_log_dets, GrowthEstimates, SampleRecord};
use super::report::{ExperimentReport, Metadata};
use super::stats::{log_mean_exp, max_share, mean_stderr};
use crate::ensembles::{sample, sample_correlated_wigner_family, sample_kernel, EnsembleSpec, EntryDistribution};
use crate::error::{Error, Result};
use crate::linalg::det;
use crate::par::map_indexed;
use crate::reference::ReferenceMeasure;
use crate::rng::derive_seed;
use crate::spectral::{cut_entries, eigenvalues, ks_distance, rank_upper_bound, sign_log_abs_det_from_eigs, EmpiricalMeasure};

/// `E[det((1/N) Y Yᵀ)] = N! / (N^p (N-p)!) = Π_{k<p} (N-k)/N`.
pub fn dembo_formula(p: usize, n: usize) -> f64 {
    (0..p).map(|k| (n - k) as f64 / n as f64).product()
}

/// Monte Carlo mean of `det((1/N) Y Yᵀ)` against the exact formula; passes
/// within three standard errors.
pub fn dembo_exact_check(p: usize, n: usize, dist: EntryDistribution, samples: usize, seed: u64) -> Result<ExperimentReport> {
    if p == 0 || p > n {
        return Err(Error::param(format!("need 1 <= p <= N, got p={p}, N={n}")));
    }
    let spec = EnsembleSpec::Covariance { rows: p, cols: n, dist, shift: 0.0 };
    spec.validate()?;
    let dets = map_indexed(samples, |k| -> Result<f64> {
        let h = sample(&spec, derive_seed(seed, "dembo", k as u64))?;
        Ok(det(h.to_dense(), p))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let (mean, se) = mean_stderr(&dets);
    let oracle = dembo_formula(p, n);
    let md = Metadata::for_spec(&spec, seed).note("passes when |mean - oracle| <= 3 stderr");
    Ok(ExperimentReport::within("dembo", mean, se, oracle, 3.0 * se, samples, p, md))
}

/// Fraction of samples with an eigenvalue in `[e - δ, e + δ]`, against the
/// first-order heuristic `min(1, 2δ N ρ(e))`. The spec's own shift is ignored;
/// `e` refers to the unshifted matrix.
pub fn wegner_gap_probability(spec: &EnsembleSpec, e: f64, delta: f64, samples: usize, seed: u64, tolerance: f64) -> Result<ExperimentReport> {
    if !(delta > 0.0) {
        return Err(Error::param("delta must be positive"));
    }
    let (base, _) = spec.split_shift();
    base.validate()?;
    let hits = map_indexed(samples, |k| -> Result<bool> {
        let h = sample(&base, derive_seed(seed, "wegner", k as u64))?;
        let m = EmpiricalMeasure::new(eigenvalues(&h)?);
        Ok(m.count_in(e - delta, e + delta) > 0)
    })
    .into_iter()
    .collect::<Result<Vec<bool>>>()?;
    let frac = hits.iter().filter(|h| **h).count() as f64 / samples as f64;
    let se = (frac * (1.0 - frac) / samples as f64).sqrt();
    let rho = reference_for(&base)?.density(e);
    let oracle = (2.0 * delta * base.dim() as f64 * rho).min(1.0);
    let md = Metadata::for_spec(&base, seed).value("reference_density", rho).value("delta", delta).value("energy", e);
    Ok(ExperimentReport::within("wegner", frac, se, oracle, tolerance, samples, base.dim(), md))
}

/// `(1/N) log E[Π_i |det W^{(i)}|]` for `ℓ` correlated Gaussian Wigner
/// matrices against `ℓ · ∫ log|λ| ρ_sc = -ℓ/2`.
pub fn product_factoring(rho: f64, ell: usize, n: usize, samples: usize, seed: u64, tolerance: f64) -> Result<ExperimentReport> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidRho(rho));
    }
    let per = map_indexed(samples, |k| -> Result<(f64, f64)> {
        let mats = sample_correlated_wigner_family(n, rho, ell, derive_seed(seed, "products", k as u64))?;
        let mut logs = Vec::with_capacity(ell);
        for m in &mats {
            let eig = eigenvalues(m)?;
            logs.push(sign_log_abs_det_from_eigs(&eig, m.frobenius()).1);
        }
        Ok((logs.iter().sum(), logs[0]))
    })
    .into_iter()
    .collect::<Result<Vec<(f64, f64)>>>()?;
    let prod: Vec<f64> = per.iter().map(|p| p.0).collect();
    let single: Vec<f64> = per.iter().map(|p| p.1).collect();
    let est = GrowthEstimates::from_log_dets(&prod, n);
    let one = GrowthEstimates::from_log_dets(&single, n);
    let oracle = ell as f64 * reference_for(&EnsembleSpec::goe(n))?.log_potential(0.0);
    let md = est
        .annotate(Metadata::for_tag(&format!("products rho={rho} ell={ell} n={n}"), seed))
        .value("rho", rho)
        .value("single_mean_of_logs", one.mean_of_logs);
    Ok(ExperimentReport::within("products", est.mean_of_logs, est.mean_of_logs_stderr, oracle, tolerance, samples, n, md))
}

/// Largest `|f(x-h) - 2f(x) + f(x+h)|`-signed second difference of
/// `f(x) = (a + x^{1/p})^{p/2} (b + x^{1/p})^{p/2}` over a uniform grid.
/// Concavity means it never exceeds 0 beyond rounding.
pub fn lemma_b2_max_second_difference(a: f64, b: f64, p: f64, lo: f64, hi: f64, points: usize) -> f64 {
    let f = |x: f64| (a + x.powf(1.0 / p)).powf(p / 2.0) * (b + x.powf(1.0 / p)).powf(p / 2.0);
    let h = (hi - lo) / (points - 1) as f64;
    (1..points - 1)
        .map(|k| {
            let x = lo + h * k as f64;
            f(x - h) - 2.0 * f(x) + f(x + h)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Tolerance for the concavity check.
pub const CONCAVITY_TOL: f64 = 1e-10;

pub fn concavity_check_lemma_b2(a: f64, b: f64, p: f64, lo: f64, hi: f64, points: usize) -> Result<bool> {
    if !(a >= 0.0 && b >= 0.0 && p >= 1.0) || points < 3 || !(hi > lo && lo >= 0.0) {
        return Err(Error::param("need a, b >= 0, p >= 1, 0 <= lo < hi and at least 3 points"));
    }
    Ok(lemma_b2_max_second_difference(a, b, p, lo, hi, points) <= CONCAVITY_TOL)
}

/// Frequency of `d_KS(spectrum(H), spectrum(cut(H))) > N^{-κ}` with entries
/// cut at `N^{-κ}`, plus the deterministic bound `d_KS <= rank(H - cut)/N` on
/// every sample. Passes when the bound always holds and the frequency is at
/// most `tolerance`.
pub fn truncation_stability_check(spec: &EnsembleSpec, kappa: f64, samples: usize, seed: u64, tolerance: f64) -> Result<ExperimentReport> {
    if !(kappa > 0.0 && kappa < 0.5) {
        return Err(Error::param(format!("kappa must lie in (0, 1/2), got {kappa}")));
    }
    let (base, _) = spec.split_shift();
    base.validate()?;
    let n = base.dim();
    let level = (n as f64).powf(-kappa);
    let rows = map_indexed(samples, |k| -> Result<(f64, usize)> {
        let h = sample(&base, derive_seed(seed, "truncation", k as u64))?;
        let cut = cut_entries(&h, level);
        let ks = ks_distance(&EmpiricalMeasure::new(eigenvalues(&h)?), &EmpiricalMeasure::new(eigenvalues(&cut)?));
        Ok((ks, rank_upper_bound(&h.sub(&cut))))
    })
    .into_iter()
    .collect::<Result<Vec<(f64, usize)>>>()?;
    let bad = rows.iter().filter(|r| r.0 > level).count();
    let bound_ok = rows.iter().filter(|r| r.0 <= r.1 as f64 / n as f64 + 1e-15).count();
    let max_ks = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let freq = bad as f64 / samples as f64;
    let md = Metadata::for_spec(&base, seed)
        .value("cut_level", level)
        .value("rank_bound_holds", bound_ok as f64)
        .value("max_ks", max_ks);
    let mut rep = ExperimentReport::within("truncation", freq, (freq * (1.0 - freq) / samples as f64).sqrt(), 0.0, tolerance, samples, n, md);
    rep.passed &= bound_ok == samples;
    Ok(rep)
}

/// Models that violate one assumption each.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Counterexample {
    Outlier { theta: f64 },
    Kernel,
}

/// Minimum excess of the outlier model over the semicircle oracle.
pub const OUTLIER_EXCESS: f64 = 0.5;
/// Minimum share of the annealed sum carried by `X_0 = N` samples.
pub const KERNEL_HIT_SHARE: f64 = 0.9;

/// Runs a counterexample model. For the outlier model the report passes when
/// the growth estimate exceeds the semicircle oracle by at least
/// [`OUTLIER_EXCESS`]; for the kernel model when hit samples carry at least
/// [`KERNEL_HIT_SHARE`] of `Σ |det|` and the no-hit estimate is within
/// `tolerance` of the oracle.
pub fn counterexample_runs(which: Counterexample, n: usize, dist: EntryDistribution, samples: usize, seed: u64, tolerance: f64) -> Result<ExperimentReport> {
    let oracle = ReferenceMeasure::semicircle(1.0).log_potential(0.0);
    match which {
        Counterexample::Outlier { theta } => {
            let spec = EnsembleSpec::OutlierCounterexample { n, dist, theta };
            let records = sample_log_dets(&spec, samples, seed, "counterexample")?;
            let logs: Vec<f64> = records.iter().map(|r| r.log_abs_det).collect();
            let est = GrowthEstimates::from_log_dets(&logs, n);
            let excess = est.mean_of_logs - oracle;
            let md = est.annotate(Metadata::for_spec(&spec, seed)).value("excess", excess);
            let mut rep = ExperimentReport::within("counterexample_outlier", est.mean_of_logs, est.mean_of_logs_stderr, oracle, f64::INFINITY, samples, n, md);
            rep.tolerance = OUTLIER_EXCESS;
            rep.passed = excess >= OUTLIER_EXCESS;
            Ok(rep)
        }
        Counterexample::Kernel => {
            let spec = EnsembleSpec::KernelCounterexample { n, dist };
            spec.validate()?;
            let rows = map_indexed(samples, |k| -> Result<(SampleRecord, bool)> {
                let s = derive_seed(seed, "counterexample", k as u64);
                let (h, hit) = sample_kernel(n, &dist, s)?;
                let eig = eigenvalues(&h)?;
                let (sign, l) = sign_log_abs_det_from_eigs(&eig, h.frobenius());
                Ok((SampleRecord { index: k, seed: s, sign, log_abs_det: l }, hit))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let all: Vec<f64> = rows.iter().map(|r| r.0.log_abs_det).filter(|l| l.is_finite()).collect();
            let hit_logs: Vec<f64> = rows.iter().filter(|r| r.1).map(|r| r.0.log_abs_det).filter(|l| l.is_finite()).collect();
            let miss: Vec<f64> = rows.iter().filter(|r| !r.1).map(|r| r.0.log_abs_det).collect();
            let est_all = GrowthEstimates::from_log_dets(&rows.iter().map(|r| r.0.log_abs_det).collect::<Vec<_>>(), n);
            let est_miss = GrowthEstimates::from_log_dets(&miss, n);
            let hit_share = if hit_logs.is_empty() {
                0.0
            } else {
                let (la, _) = log_mean_exp(&all);
                let (lh, _) = log_mean_exp(&hit_logs);
                // Σ_hit / Σ_all = (n_hit e^{lh}) / (n_all e^{la})
                ((hit_logs.len() as f64).ln() + lh - (all.len() as f64).ln() - la).exp()
            };
            let md = est_all
                .annotate(Metadata::for_spec(&spec, seed))
                .value("hits", hit_logs.len() as f64)
                .value("hit_share", hit_share)
                .value("max_share", max_share(&all))
                .value("no_hit_mean_of_logs", est_miss.mean_of_logs)
                .value("no_hit_log_mean_exp", est_miss.log_mean_exp);
            let mut rep = ExperimentReport::within("counterexample_kernel", est_miss.mean_of_logs, est_miss.mean_of_logs_stderr, oracle, tolerance, samples, n, md);
            rep.passed &= hit_logs.is_empty() || hit_share >= KERNEL_HIT_SHARE;
            Ok(rep)
        }
    }
}

/// `(log|det A|, Σ log ‖column_j‖)` for `count` random Gaussian matrices;
/// Hadamard's inequality says the first never exceeds the second.
pub fn hadamard_trials(n: usize, count: usize, seed: u64) -> Vec<(f64, f64)> {
    use rand_distr::{Distribution, StandardNormal};
    map_indexed(count, |k| {
        let mut rng = crate::rng::rng_from_seed(derive_seed(seed, "hadamard", k as u64));
        let a = crate::linalg::Dense::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        crate::spectral::hadamard_logs(&a)
    })
}
