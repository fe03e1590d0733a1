use serde::Serialize;

use super::solve::{solve_restricted, solve_unrestricted, VarProblem};
use crate::ensembles::{sample, EnsembleSpec};
use crate::error::{Error, Result};
use crate::experiments::{mean_stderr, ExperimentReport, Metadata};
use crate::par::map_indexed;
use crate::rng::derive_seed;
use crate::spectral::{eigenvalues, sign_log_abs_det_from_eigs};

/// `H` counts as positive semidefinite when `λ_min(H) > -POSITIVE_DEFINITE_TOL · ‖H‖`.
pub const POSITIVE_DEFINITE_TOL: f64 = 1e-10;

/// Per-`u` Monte Carlo values.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LaplaceRow {
    pub u: f64,
    /// Mean over samples of `(1/N) log|det H_N(u)|`.
    pub growth: f64,
    pub growth_stderr: f64,
    /// Fraction of samples with `H_N(u) >= 0`.
    pub pd_fraction: f64,
    /// `log` of the unrestricted integrand `e^{-(N+p)αu²} e^{N·growth}`.
    pub log_integrand: f64,
    pub log_integrand_restricted: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplaceReport {
    /// `(1/N) log ∫_D` against `sup_D S_α`.
    pub unrestricted: ExperimentReport,
    /// The same with the integrand weighted by the positive-definite fraction,
    /// against `sup_{D ∩ G} S_α`.
    pub restricted: ExperimentReport,
    pub rows: Vec<LaplaceRow>,
}

/// `(log|det|, positive semidefinite)` per grid point for one base sample.
fn shifted_logs(eig: &[f64], trace: f64, fro2: f64, shifts: &[f64]) -> Vec<(f64, bool)> {
    let n = eig.len() as f64;
    let mut shifted = eig.to_vec();
    shifts
        .iter()
        .map(|&e| {
            for (s, l) in shifted.iter_mut().zip(eig) {
                *s = l - e;
            }
            let norm = (fro2 - 2.0 * e * trace + n * e * e).max(0.0).sqrt();
            let (_, logabs) = sign_log_abs_det_from_eigs(&shifted, norm);
            (logabs, shifted[0] > -POSITIVE_DEFINITE_TOL * norm)
        })
        .collect()
}

fn log_trapezoid(u: &[f64], logf: &[f64]) -> f64 {
    let terms: Vec<f64> = u
        .windows(2)
        .zip(logf.windows(2))
        .map(|(x, f)| {
            let m = f[0].max(f[1]);
            if m == f64::NEG_INFINITY {
                return m;
            }
            m + (0.5 * ((f[0] - m).exp() + (f[1] - m).exp()) * (x[1] - x[0])).ln()
        })
        .collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn check_interior(logf: &[f64]) -> Result<()> {
    let (idx, best) = logf.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if best == f64::NEG_INFINITY {
        return Err(Error::EmptyGoodSet);
    }
    if idx == 0 || idx + 1 == logf.len() {
        return Err(Error::GridMissesMaximizer);
    }
    Ok(())
}

/// Monte Carlo Laplace integral `(1/N) log ∫_D e^{-(N+p)αu²} E|det H_N(u)| du`
/// on a one-dimensional `u_grid`, with `E|det|` replaced by
/// `exp(N · mean (1/N) log|det|)`, compared with `sup_D S_α`. Sample `k` uses the
/// same seed at every `u`. When `spec_builder(u)` only changes the shift, each
/// base matrix is diagonalized once.
pub fn laplace_crosscheck(
    prob: &VarProblem,
    spec_builder: impl Fn(f64) -> EnsembleSpec + Sync,
    u_grid: &[f64],
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<LaplaceReport> {
    prob.validate()?;
    if prob.dim() != 1 {
        return Err(Error::spec("the Laplace cross-check integrates over one-dimensional u only"));
    }
    if u_grid.len() < 3 || u_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("u_grid needs at least three increasing points"));
    }
    if samples < 2 {
        return Err(Error::param("need at least two samples"));
    }
    let specs: Vec<EnsembleSpec> = u_grid.iter().map(|&u| spec_builder(u)).collect();
    for s in &specs {
        s.validate()?;
    }
    let n = specs[0].dim();
    if specs.iter().any(|s| s.dim() != n) {
        return Err(Error::spec("spec_builder must keep N fixed"));
    }
    let split: Vec<(EnsembleSpec, f64)> = specs.iter().map(|s| s.split_shift()).collect();
    let base_json = split[0].0.canonical_json();
    let shift_only = split.iter().all(|(b, _)| b.canonical_json() == base_json);

    // table[k][i] = (log|det|, psd) for sample k at grid point i
    let table: Vec<Vec<(f64, bool)>> = map_indexed(samples, |k| -> Result<Vec<(f64, bool)>> {
        let s = derive_seed(seed, "laplace", k as u64);
        if shift_only {
            let h = sample(&split[0].0, s)?;
            let eig = eigenvalues(&h)?;
            let trace: f64 = h.diag().iter().sum();
            let shifts: Vec<f64> = split.iter().map(|p| p.1).collect();
            Ok(shifted_logs(&eig, trace, h.frobenius().powi(2), &shifts))
        } else {
            specs
                .iter()
                .map(|spec| {
                    let h = sample(spec, s)?;
                    let eig = eigenvalues(&h)?;
                    let norm = h.frobenius();
                    Ok((sign_log_abs_det_from_eigs(&eig, norm).1, eig[0] > -POSITIVE_DEFINITE_TOL * norm))
                })
                .collect()
        }
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let nf = n as f64;
    let rows: Vec<LaplaceRow> = u_grid
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let logs: Vec<f64> = table.iter().map(|r| r[i].0).filter(|l| l.is_finite()).collect();
            let (m, se) = mean_stderr(&logs);
            let frac = table.iter().filter(|r| r[i].1).count() as f64 / samples as f64;
            let inside = prob.domain.contains(&[u]);
            let log_f = if inside { m - (nf + prob.p_shift) * prob.alpha * u * u } else { f64::NEG_INFINITY };
            LaplaceRow {
                u,
                growth: m / nf,
                growth_stderr: se / nf,
                pd_fraction: frac,
                log_integrand: log_f,
                log_integrand_restricted: log_f + frac.ln(),
            }
        })
        .collect();

    let logf: Vec<f64> = rows.iter().map(|r| r.log_integrand).collect();
    let logf_r: Vec<f64> = rows.iter().map(|r| r.log_integrand_restricted).collect();
    check_interior(&logf)?;
    check_interior(&logf_r)?;
    let est = log_trapezoid(u_grid, &logf) / nf;
    let est_r = log_trapezoid(u_grid, &logf_r) / nf;
    let peak_se = |lf: &[f64]| {
        let i = lf.iter().enumerate().fold(0, |b, (i, &v)| if v > lf[b] { i } else { b });
        rows[i].growth_stderr
    };

    let sup = solve_unrestricted(prob)?;
    let sup_r = solve_restricted(prob)?;
    let tag = format!("laplace {} alpha={} n={n}", prob.family.name(), prob.alpha);
    let md = |u_star: f64| {
        Metadata::for_tag(&tag, seed)
            .value("u_star", u_star)
            .value("alpha", prob.alpha)
            .value("p_shift", prob.p_shift)
            .note("E|det| at each u is replaced by exp of the mean of log|det| over samples sharing seeds across u")
    };
    let unrestricted = ExperimentReport::within("laplace", est, peak_se(&logf), sup.value, tolerance, samples, n, md(sup.u[0]));
    let restricted = ExperimentReport::within(
        "laplace_restricted",
        est_r,
        peak_se(&logf_r),
        sup_r.solution.value,
        tolerance,
        samples,
        n,
        md(sup_r.solution.u[0]),
    );
    Ok(LaplaceReport { unrestricted, restricted, rows })
}
