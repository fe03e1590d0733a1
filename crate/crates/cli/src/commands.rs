use detlab::experiments::{
    concavity_random_triples, counterexample_runs, decomposition_check, dembo_exact_check, estimate_det_growth,
    growth_oracle, growth_samples, hadamard_check, moment_transition, product_factoring, schur_identity_check,
    truncation_stability_check, wegner_gap_probability, write_report_csv, Counterexample, ExperimentReport,
    CONCAVITY_TOL, IDENTITY_TOL,
};
use detlab::output::write_csv_rows;
use detlab::reference::{mde_density, mde_solve, DensityOptions, FreeConvolution, MdeProblem};
use detlab::variational::{
    good_set_membership, laplace_crosscheck, s_alpha, solve_restricted, solve_unrestricted, Domain, FamilySpec,
    MeasureFamily, VarProblem,
};
use detlab::{EnsembleSpec, EntryDistribution, ReferenceMeasure};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::config::RunConfig;

pub enum CmdError {
    Usage(String),
    Numeric(detlab::Error),
}

/// Rejected inputs are usage errors; everything else is numerical.
impl From<detlab::Error> for CmdError {
    fn from(e: detlab::Error) -> Self {
        match e {
            detlab::Error::InvalidSpec(_) | detlab::Error::InvalidParameter(_) | detlab::Error::InvalidRho(_) | detlab::Error::Config(_) => {
                CmdError::Usage(e.to_string())
            }
            e => CmdError::Numeric(e),
        }
    }
}

type CmdResult<T> = Result<T, CmdError>;

/// What a subcommand produced: the `result` block of the summary and any CSV files.
pub struct Outcome {
    pub passed: bool,
    pub params: Value,
    pub result: Value,
    pub files: Vec<(String, Vec<u8>)>,
}

pub struct Ctx<'a> {
    pub seed: u64,
    pub dry_run: bool,
    pub config: &'a RunConfig,
}

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(msg.into())
}

fn dist(s: &Option<String>) -> CmdResult<EntryDistribution> {
    match s {
        Some(s) => s.parse().map_err(|e: detlab::Error| usage(e.to_string())),
        None => Ok(EntryDistribution::gaussian()),
    }
}

fn csv<T: Serialize>(rows: &[T]) -> CmdResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv_rows(&mut buf, rows)?;
    Ok(buf)
}

fn reports_csv(reports: &[ExperimentReport]) -> CmdResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_report_csv(&mut buf, reports)?;
    Ok(buf)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn dry(params: Value, plan: Value) -> Outcome {
    Outcome { passed: true, params, result: json!({ "dry_run": true, "plan": plan }), files: Vec::new() }
}

/// The ensemble from the config `[spec]` table, or else from the model flags.
fn build_spec(ctx: &Ctx<'_>, m: &ModelArgs, default_n: usize) -> CmdResult<EnsembleSpec> {
    if let Some(spec) = &ctx.config.spec {
        return Ok(spec.clone());
    }
    let n = m.n.unwrap_or(default_n);
    let nf = n as f64;
    let d = dist(&m.dist)?;
    let spec = match m.model.as_deref().unwrap_or("wigner") {
        "wigner" => EnsembleSpec::wigner(n, d, 0.0),
        "erdos-renyi" | "erdos_renyi" => EnsembleSpec::ErdosRenyi { n, p: m.edge_p.unwrap_or(nf.powf(-0.5)), shift: 0.0 },
        "d-regular" | "d_regular" => {
            EnsembleSpec::DRegular { n, d: m.degree.unwrap_or(nf.sqrt().ceil() as usize), shift: 0.0 }
        }
        "band" => EnsembleSpec::Band { n, bandwidth: m.bandwidth.unwrap_or(nf.powf(0.6).ceil() as usize), dist: d, shift: 0.0 },
        "covariance" => EnsembleSpec::Covariance { rows: m.rows.unwrap_or(n / 2), cols: n, dist: d, shift: 0.0 },
        other => return Err(usage(format!("unknown model {other:?}; expected wigner, erdos-renyi, d-regular, band or covariance"))),
    };
    Ok(spec)
}

pub fn detgrowth(ctx: &Ctx<'_>, a: &DetgrowthArgs) -> CmdResult<Outcome> {
    let base = build_spec(ctx, &a.model, 400)?;
    let spec = match a.energy {
        Some(e) => base.with_shift(e),
        None => base,
    };
    let samples = a.samples.unwrap_or(200);
    let tol = a.tolerance.unwrap_or(0.03);
    spec.validate()?;
    let params = json!({ "spec": spec, "samples": samples, "tolerance": tol, "per_sample": a.per_sample });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "oracle": growth_oracle(&spec)? })));
    }
    let report = estimate_det_growth(&spec, samples, ctx.seed, tol)?;
    let mut files = vec![("report.csv".to_string(), reports_csv(std::slice::from_ref(&report))?)];
    if a.per_sample {
        let (records, _) = growth_samples(&spec, samples, ctx.seed)?;
        files.push(("samples.csv".to_string(), csv(&records)?));
    }
    Ok(Outcome { passed: report.passed, params, result: to_value(&report), files })
}

pub fn dembo(ctx: &Ctx<'_>, a: &DemboArgs) -> CmdResult<Outcome> {
    let n = a.n.unwrap_or(8);
    let p = a.p.unwrap_or(4);
    let samples = a.samples.unwrap_or(100_000);
    let d = dist(&a.dist)?;
    let params = json!({ "n": n, "p": p, "samples": samples, "dist": d });
    if p == 0 || p > n {
        return Err(usage(format!("need 1 <= p <= n, got p={p}, n={n}")));
    }
    if ctx.dry_run {
        return Ok(dry(params, json!({ "oracle": detlab::experiments::dembo_formula(p, n) })));
    }
    let report = dembo_exact_check(p, n, d, samples, ctx.seed)?;
    let files = vec![("report.csv".to_string(), reports_csv(std::slice::from_ref(&report))?)];
    Ok(Outcome { passed: report.passed, params, result: to_value(&report), files })
}

pub fn wegner(ctx: &Ctx<'_>, a: &WegnerArgs) -> CmdResult<Outcome> {
    let spec = build_spec(ctx, &a.model, 200)?;
    let n = spec.dim() as f64;
    let delta = a.delta.unwrap_or(n.powi(-2));
    let e = a.energy.unwrap_or(0.0);
    let samples = a.samples.unwrap_or(500);
    let tol = a.tolerance.unwrap_or(0.05);
    spec.validate()?;
    let params = json!({ "spec": spec, "delta": delta, "energy": e, "samples": samples, "tolerance": tol });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "interval": [e - delta, e + delta] })));
    }
    let report = wegner_gap_probability(&spec, e, delta, samples, ctx.seed, tol)?;
    let files = vec![("report.csv".to_string(), reports_csv(std::slice::from_ref(&report))?)];
    Ok(Outcome { passed: report.passed, params, result: to_value(&report), files })
}

fn mde_problem(ctx: &Ctx<'_>, a: &MdeArgs) -> CmdResult<MdeProblem> {
    if a.flat_goe {
        return Ok(MdeProblem::flat_goe(a.n.unwrap_or(100))?);
    }
    match &ctx.config.spec {
        Some(EnsembleSpec::VarianceProfile { mean, variances }) => {
            Ok(MdeProblem::new(mean.clone(), variances.iter().flatten().copied().collect())?)
        }
        Some(EnsembleSpec::BlockGaussian { means, variances, goe_diagonal, .. }) => {
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
            Ok(MdeProblem::block(means, &profiles)?)
        }
        _ => Err(usage("mde needs --flat-goe or a variance_profile / block_gaussian [spec] in the config")),
    }
}

pub fn mde(ctx: &Ctx<'_>, a: &MdeArgs) -> CmdResult<Outcome> {
    let prob = mde_problem(ctx, a)?;
    let z = Complex64::new(a.z_re.unwrap_or(0.0), a.z_imag.unwrap_or(1.0));
    if !(z.im > 0.0) {
        return Err(usage("--z-imag must be positive"));
    }
    let points = a.points.unwrap_or(4001);
    let params = json!({ "n": prob.n(), "flat_goe": a.flat_goe, "z": [z.re, z.im], "density": a.density, "points": points });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "blocks": prob.blocks().len() })));
    }
    let sol = mde_solve(&prob, z)?;
    let m = sol.normalized_trace();
    let mut result = json!({
        "m": { "re": m.re, "im": m.im },
        "residual": sol.residual,
        "iterations": sol.iterations,
    });
    let mut passed = sol.residual <= detlab::reference::MDE_RESIDUAL_TOL;
    if a.flat_goe {
        let sc = ReferenceMeasure::semicircle(1.0).stieltjes(z);
        let err = (m - sc).norm();
        result["oracle"] = json!({ "re": sc.re, "im": sc.im });
        result["oracle_error"] = json!(err);
        passed &= err <= 1e-6;
    }
    let mut files = Vec::new();
    if a.density {
        let d = mde_density(&prob, DensityOptions { points, ..DensityOptions::default() })?;
        result["renormalization"] = json!(d.renormalization);
        let mut buf = Vec::new();
        d.write_csv(&mut buf)?;
        files.push(("stieltjes.csv".to_string(), buf));
        let mut buf = Vec::new();
        d.measure.write_csv(&mut buf)?;
        files.push(("density.csv".to_string(), buf));
    }
    Ok(Outcome { passed, params, result, files })
}

fn parse_measure(s: &str) -> CmdResult<ReferenceMeasure> {
    let (kind, arg) = s.split_once(':').ok_or_else(|| usage(format!("measure {s:?} must look like sc:1, mp:0.5 or atoms:1,2")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number {t:?} in {s:?}")));
    match kind {
        "sc" => Ok(ReferenceMeasure::semicircle(num(arg)?)),
        "mp" => Ok(ReferenceMeasure::marchenko_pastur(num(arg)?)?),
        "atoms" => {
            let xs = arg.split(',').map(num).collect::<CmdResult<Vec<f64>>>()?;
            let w = vec![1.0; xs.len()];
            Ok(ReferenceMeasure::atomic(xs, w)?)
        }
        _ => Err(usage(format!("unknown measure kind {kind:?}"))),
    }
}

fn semicircle_sigma(s: &str) -> Option<f64> {
    s.strip_prefix("sc:").and_then(|t| t.parse().ok())
}

pub fn freeconv(ctx: &Ctx<'_>, a: &FreeconvArgs) -> CmdResult<Outcome> {
    let sa = a.a.clone().unwrap_or_else(|| "sc:1".into());
    let sb = a.b.clone().unwrap_or_else(|| "sc:1".into());
    let (ma, mb) = (parse_measure(&sa)?, parse_measure(&sb)?);
    let z = Complex64::new(a.z_re.unwrap_or(0.0), a.z_imag.unwrap_or(1.0));
    if !(z.im > 0.0) {
        return Err(usage("--z-imag must be positive"));
    }
    let points = a.points.unwrap_or(4001);
    let params = json!({ "a": sa, "b": sb, "z": [z.re, z.im], "density": a.density, "points": points });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "support_a": [ma.left_edge(), ma.right_edge()], "support_b": [mb.left_edge(), mb.right_edge()] })));
    }
    let fc = FreeConvolution::new(ma, mb);
    let sub = fc.subordination(z)?;
    let mut result = json!({
        "m": { "re": sub.m.re, "im": sub.m.im },
        "omega1": { "re": sub.omega1.re, "im": sub.omega1.im },
        "omega2": { "re": sub.omega2.re, "im": sub.omega2.im },
        "residual": sub.residual,
        "iterations": sub.iterations,
    });
    let mut passed = sub.residual <= detlab::reference::SUBORDINATION_TOL;
    if let (Some(x), Some(y)) = (semicircle_sigma(&sa), semicircle_sigma(&sb)) {
        let sc = ReferenceMeasure::semicircle((x * x + y * y).sqrt()).stieltjes(z);
        let err = (sub.m - sc).norm();
        result["oracle"] = json!({ "re": sc.re, "im": sc.im });
        result["oracle_error"] = json!(err);
        passed &= err <= 1e-6;
    }
    let mut files = Vec::new();
    if a.density {
        let (mu, factor) = fc.density(DensityOptions { points, ..DensityOptions::default() })?;
        result["renormalization"] = json!(factor);
        let mut buf = Vec::new();
        mu.write_csv(&mut buf)?;
        files.push(("density.csv".to_string(), buf));
    }
    Ok(Outcome { passed, params, result, files })
}

fn family(ctx: &Ctx<'_>) -> CmdResult<(FamilySpec, MeasureFamily)> {
    let spec = ctx.config.family.clone().unwrap_or(FamilySpec::ShiftedSemicircle);
    let fam = MeasureFamily::from_spec(&spec)?;
    Ok((spec, fam))
}

fn domain(ctx: &Ctx<'_>, lower: Option<f64>, upper: Option<f64>) -> Domain {
    match (&ctx.config.domain, lower, upper) {
        (_, Some(_), _) | (_, _, Some(_)) => Domain::interval(lower, upper),
        (Some(d), _, _) => d.clone(),
        _ => Domain::whole(),
    }
}

#[derive(Serialize)]
struct CurveRow {
    u: f64,
    s_alpha: f64,
    class: String,
}

pub fn variational(ctx: &Ctx<'_>, a: &VariationalArgs) -> CmdResult<Outcome> {
    let (fspec, fam) = family(ctx)?;
    let alpha = a.alpha.unwrap_or(0.5);
    let eps = a.eps.unwrap_or(0.01);
    let dom = domain(ctx, a.lower, a.upper);
    let prob = VarProblem::new(fam, alpha, dom.clone())?;
    let params = json!({ "family": fspec, "alpha": alpha, "domain": dom, "restricted": a.restricted, "eps": eps });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "dimension": prob.dim() })));
    }
    let mut files = Vec::new();
    let (result, radius) = if a.restricted {
        let r = solve_restricted(&prob)?;
        files.push(("trace.csv".to_string(), csv(&r.trace.iter().map(|t| (t.eps, t.u[0], t.value)).collect::<Vec<_>>())?));
        let radius = r.solution.radius;
        (json!({ "solution": r.solution, "trace": r.trace, "monotone": r.is_monotone(1e-9) }), radius)
    } else {
        let s = solve_unrestricted(&prob)?;
        let radius = s.radius;
        (to_value(&s), radius)
    };
    if prob.dim() == 1 {
        let rows = (0..401)
            .map(|k| {
                let u = -radius + 2.0 * radius * k as f64 / 400.0;
                let class = good_set_membership(&prob, &[u], eps)?.class;
                let class = serde_json::to_value(class).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default();
                Ok(CurveRow { u, s_alpha: s_alpha(&prob, &[u])?, class })
            })
            .collect::<CmdResult<Vec<_>>>()?;
        files.push(("curve.csv".to_string(), csv(&rows)?));
    }
    Ok(Outcome { passed: true, params, result, files })
}

pub fn laplace(ctx: &Ctx<'_>, a: &LaplaceArgs) -> CmdResult<Outcome> {
    let (fspec, fam) = family(ctx)?;
    let alpha = a.alpha.unwrap_or(0.5);
    let n = a.n.unwrap_or(200);
    let samples = a.samples.unwrap_or(200);
    let d = dist(&a.dist)?;
    let (lo, hi, pts) = (a.u_min.unwrap_or(-4.0), a.u_max.unwrap_or(4.0), a.u_points.unwrap_or(1601));
    let tol = a.tolerance.unwrap_or(0.05);
    let tol_r = a.restricted_tolerance.unwrap_or(0.1);
    if !(hi > lo) || pts < 3 {
        return Err(usage("need u_min < u_max and at least 3 u points"));
    }
    let base = ctx.config.spec.clone().unwrap_or_else(|| EnsembleSpec::wigner(n, d, 0.0));
    base.validate()?;
    let dom = ctx.config.domain.clone().unwrap_or_default();
    let prob = VarProblem::new(fam, alpha, dom)?;
    let params = json!({
        "family": fspec, "alpha": alpha, "base": base, "samples": samples,
        "u_grid": [lo, hi, pts], "tolerance": tol, "restricted_tolerance": tol_r,
    });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "matrix": "base - shift with shift = -u" })));
    }
    let grid: Vec<f64> = (0..pts).map(|k| lo + (hi - lo) * k as f64 / (pts - 1) as f64).collect();
    let rep = laplace_crosscheck(&prob, |u| base.with_shift(-u), &grid, samples, ctx.seed, tol)?;
    let mut restricted = rep.restricted.clone();
    restricted.tolerance = tol_r;
    restricted.passed = (restricted.estimate - restricted.oracle).abs() <= tol_r;
    let passed = rep.unrestricted.passed && restricted.passed;
    let files = vec![
        ("report.csv".to_string(), reports_csv(&[rep.unrestricted.clone(), restricted.clone()])?),
        ("grid.csv".to_string(), csv(&rep.rows)?),
    ];
    Ok(Outcome { passed, params, result: json!({ "unrestricted": rep.unrestricted, "restricted": restricted }), files })
}

pub fn products(ctx: &Ctx<'_>, a: &ProductsArgs) -> CmdResult<Outcome> {
    let rho = a.rho.unwrap_or(0.0);
    let ell = a.ell.unwrap_or(2);
    let n = a.n.unwrap_or(300);
    let samples = a.samples.unwrap_or(200);
    let tol = a.tolerance.unwrap_or(0.08);
    let params = json!({ "rho": rho, "ell": ell, "n": n, "samples": samples, "tolerance": tol });
    if !(0.0..=1.0).contains(&rho) || ell == 0 {
        return Err(usage("need rho in [0, 1] and ell >= 1"));
    }
    if ctx.dry_run {
        return Ok(dry(params, json!({ "oracle": -0.5 * ell as f64 })));
    }
    let report = product_factoring(rho, ell, n, samples, ctx.seed, tol)?;
    let files = vec![("report.csv".to_string(), reports_csv(std::slice::from_ref(&report))?)];
    Ok(Outcome { passed: report.passed, params, result: to_value(&report), files })
}

pub fn moments(ctx: &Ctx<'_>, a: &MomentsArgs) -> CmdResult<Outcome> {
    let p = a.p_exp.unwrap_or(1.0);
    let d = dist(&a.dist)?;
    let n = a.n.unwrap_or(20);
    let samples = a.samples.unwrap_or(10_000);
    let params = json!({ "p_exp": p, "dist": d, "n": n, "samples": samples });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "finite_moment": d.has_moment(2.0 * p) })));
    }
    let r = moment_transition(p, d, n, samples, ctx.seed)?;
    let files = vec![("running_mean.csv".to_string(), csv(&r.running_log_mean)?)];
    Ok(Outcome { passed: r.report.passed, params, result: to_value(&r), files })
}

pub fn decomp_test(ctx: &Ctx<'_>, a: &DecompArgs) -> CmdResult<Outcome> {
    let energies = a.energies.clone().unwrap_or_else(|| vec![-1.0, 0.0, 0.5, 1.0, 2.0]);
    let eta = a.eta.unwrap_or(0.05);
    let k = a.k.unwrap_or(20.0);
    let points = a.points.unwrap_or(20_001);
    let trials = a.trials.unwrap_or(100);
    let params = json!({ "energies": energies, "eta": eta, "k": k, "points": points, "trials": trials });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "checks": ["decomposition", "schur", "hadamard", "concavity", "truncation"] })));
    }
    let decomp = energies.iter().map(|&e| decomposition_check(e, eta, k, 4.0, points)).collect::<detlab::Result<Vec<_>>>()?;
    let schur = schur_identity_check(20, trials, ctx.seed)?;
    let hadamard = hadamard_check(12, trials, ctx.seed);
    let (concave, worst) = concavity_random_triples(trials, 10_000, ctx.seed);
    let trunc = truncation_stability_check(&EnsembleSpec::goe(100), 0.1, trials, ctx.seed, 1.0)?;
    let rank_ok = trunc.value("rank_bound_holds").unwrap_or(0.0) as usize;
    let passed = decomp.iter().all(|d| d.passed) && schur <= IDENTITY_TOL && hadamard == trials && concave == trials && rank_ok == trials;
    let result = json!({
        "decomposition": decomp,
        "schur_max_relative_gap": schur,
        "hadamard_holds": hadamard,
        "concavity_holds": concave,
        "concavity_max_second_difference": worst,
        "concavity_tolerance": CONCAVITY_TOL,
        "truncation_rank_bound_holds": rank_ok,
        "trials": trials,
    });
    Ok(Outcome { passed, params, result, files: vec![("decomposition.csv".to_string(), csv(&decomp)?)] })
}

pub fn counterexample(ctx: &Ctx<'_>, a: &CounterexampleArgs) -> CmdResult<Outcome> {
    let which = a.which.clone().unwrap_or_else(|| "outlier".into());
    let theta = a.theta.unwrap_or(0.125);
    let (kind, n0, s0) = match which.as_str() {
        "outlier" => (Counterexample::Outlier { theta }, 256, 200),
        "kernel" => (Counterexample::Kernel, 100, 10_000),
        other => return Err(usage(format!("unknown counterexample {other:?}; expected outlier or kernel"))),
    };
    let n = a.n.unwrap_or(n0);
    let samples = a.samples.unwrap_or(s0);
    let d = dist(&a.dist)?;
    let tol = a.tolerance.unwrap_or(0.05);
    let params = json!({ "which": which, "n": n, "samples": samples, "theta": theta, "dist": d, "tolerance": tol });
    if ctx.dry_run {
        return Ok(dry(params, json!({ "oracle": -0.5 })));
    }
    let report = counterexample_runs(kind, n, d, samples, ctx.seed, tol)?;
    let files = vec![("report.csv".to_string(), reports_csv(std::slice::from_ref(&report))?)];
    Ok(Outcome { passed: report.passed, params, result: to_value(&report), files })
}
