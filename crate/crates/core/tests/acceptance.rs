//! Acceptance run: one PASS/FAIL line per check, with the tolerances pinned
//! below. Lines marked `known` are documented mismatches and do not change
//! the exit status; any other failure does.

use std::time::Instant;

use detlab::ensembles::{EnsembleSpec, EntryDistribution};
use detlab::experiments::*;
use detlab::reference::{block_mde_solve, mde_density, mde_solve, DensityOptions, FreeConvolution, MdeProblem};
use detlab::rng::{derive_seed, rng_from_seed};
use detlab::spectral::{bl_distance, w1_distance};
use detlab::variational::{laplace_crosscheck, solve_restricted, solve_unrestricted, Domain, MeasureFamily, VarProblem};
use detlab::{EmpiricalMeasure, ReferenceMeasure, SymMatrix};
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 20_240_601;

const WIGNER_TOL: f64 = 0.03;
const WIGNER_CELL_SECONDS: f64 = 120.0;
const DEMBO_SAMPLES: usize = 100_000;
const DEMBO_SIGMAS: f64 = 3.0;
const MP_TOL: f64 = 0.03;
const MP_STIRLING_TOL: f64 = 1e-6;
const STRUCTURED_TOL: f64 = 0.05;
const MDE_STIELTJES_TOL: f64 = 1e-6;
const BLOCK_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 5e-3;
const FREECONV_TOL: f64 = 1e-6;
const FREE_ADDITION_TOL: f64 = 0.05;
const VARIATIONAL_TOL: f64 = 1e-6;
const LAPLACE_TOL: f64 = 0.05;
const MONOTONE_TOL: f64 = 1e-9;
const PRODUCT_TOL: f64 = 0.08;
const COUNTEREXAMPLE_TOL: f64 = 0.05;

struct Tally {
    failed: Vec<String>,
    known: Vec<String>,
    passed: usize,
    /// Every growth report produced, for the log-mean-exp >= mean-of-logs check.
    growth: Vec<(String, f64, f64)>,
}

impl Tally {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        self.emit(id, ok, detail, false);
    }

    fn known(&mut self, id: &str, ok: bool, detail: String) {
        self.emit(id, ok, detail, true);
    }

    fn emit(&mut self, id: &str, ok: bool, detail: String, known: bool) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if known && !ok { "  (known)" } else { "" };
        println!("{tag}  {id:<34} {detail}{note}");
        if ok {
            self.passed += 1;
        } else if known {
            self.known.push(id.to_string());
        } else {
            self.failed.push(id.to_string());
        }
    }

    fn report(&mut self, id: &str, r: &ExperimentReport) {
        if let (Some(m), Some(l)) = (r.value("mean_of_logs"), r.value("log_mean_exp")) {
            self.growth.push((id.to_string(), m, l));
        }
        self.line(
            id,
            r.passed,
            format!("estimate {:.4} ± {:.4}  oracle {:.4}  tol {}", r.estimate, r.stderr, r.oracle, r.tolerance),
        );
    }
}

fn criterion_1(t: &mut Tally) {
    let dists = [("gaussian", EntryDistribution::gaussian()), ("rademacher", EntryDistribution::rademacher()), ("uniform", EntryDistribution::uniform())];
    for (name, dist) in dists {
        for e in [0.0, 1.0] {
            let start = Instant::now();
            let r = estimate_det_growth(&EnsembleSpec::wigner(400, dist, e), 200, SEED, WIGNER_TOL).unwrap();
            let secs = start.elapsed().as_secs_f64();
            let id = format!("1 wigner {name} E={e}");
            t.report(&id, &r);
            t.line(&format!("1 wigner {name} E={e} runtime"), secs <= WIGNER_CELL_SECONDS, format!("{secs:.1} s <= {WIGNER_CELL_SECONDS} s"));
        }
    }
}

fn criterion_2(t: &mut Tally) {
    for (n, p) in [(4, 2), (8, 4), (12, 6)] {
        for (name, dist) in [("gaussian", EntryDistribution::gaussian()), ("rademacher", EntryDistribution::rademacher())] {
            let r = dembo_exact_check(p, n, dist, DEMBO_SAMPLES, SEED).unwrap();
            let z = (r.estimate - r.oracle).abs() / r.stderr;
            t.line(
                &format!("2 dembo N={n} p={p} {name}"),
                r.passed && z <= DEMBO_SIGMAS,
                format!("mean {:.5} ± {:.5}  oracle {:.8}  |z| {z:.2} <= {DEMBO_SIGMAS}", r.estimate, r.stderr, r.oracle),
            );
        }
    }
}

fn criterion_3(t: &mut Tally) {
    let spec = EnsembleSpec::Covariance { rows: 200, cols: 400, dist: EntryDistribution::gaussian(), shift: 0.0 };
    let r = estimate_det_growth(&spec, 200, SEED, MP_TOL).unwrap();
    t.report("3 marchenko-pastur gamma=0.5", &r);
    let g: f64 = 0.5;
    let stirling = -(1.0 - g) / g * (1.0 - g).ln() - 1.0;
    let gap = (r.oracle - stirling).abs();
    t.line("3 quadrature vs stirling limit", gap <= MP_STIRLING_TOL, format!("quadrature {:.8}  stirling {stirling:.8}  gap {gap:.1e}", r.oracle));
}

fn criterion_4(t: &mut Tally) {
    let n = 400usize;
    let nf = n as f64;
    let specs = [
        ("band", EnsembleSpec::Band { n, bandwidth: nf.powf(0.6).ceil() as usize, dist: EntryDistribution::gaussian(), shift: 0.0 }),
        ("erdos-renyi", EnsembleSpec::ErdosRenyi { n, p: nf.powf(-0.5), shift: 0.0 }),
        ("d-regular", EnsembleSpec::DRegular { n, d: nf.sqrt().ceil() as usize, shift: 0.0 }),
    ];
    for (name, spec) in specs {
        let (_, est) = growth_samples(&spec, 100, SEED).unwrap();
        let ok = (est.mean_of_logs + 0.5).abs() <= STRUCTURED_TOL;
        t.growth.push((format!("4 {name}"), est.mean_of_logs, est.log_mean_exp));
        t.line(&format!("4 {name}"), ok, format!("estimate {:.4} ± {:.4}  oracle -0.5  tol {STRUCTURED_TOL}", est.mean_of_logs, est.mean_of_logs_stderr));
    }
}

fn criterion_5(t: &mut Tally) {
    let sc = ReferenceMeasure::semicircle(1.0);
    let flat = MdeProblem::flat_goe(10).unwrap();
    let worst = (0..=800)
        .map(|k| Complex64::new(-4.0 + 0.01 * k as f64, 0.1))
        .map(|z| (mde_solve(&flat, z).unwrap().normalized_trace() - sc.stieltjes(z)).norm())
        .fold(0.0, f64::max);
    t.line("5 flat mde vs m_sc on x+0.1i", worst <= MDE_STIELTJES_TOL, format!("max error {worst:.2e} <= {MDE_STIELTJES_TOL}"));

    let n = 10;
    let means: Vec<SymMatrix> = (0..n).map(|_| SymMatrix::zeros(1)).collect();
    let variances = vec![vec![1.0 / n as f64; n * n]];
    let mut gap: f64 = 0.0;
    for k in 0..=80 {
        let z = Complex64::new(-4.0 + 0.1 * k as f64, 0.1);
        let blocks = block_mde_solve(&means, &variances, z).unwrap();
        let f = mde_solve(&flat, z).unwrap();
        for (i, b) in blocks.iter().enumerate() {
            gap = gap.max((b.get(0, 0) - f.diag[i]).norm());
        }
    }
    t.line("5 block mde K=1 vs flat", gap <= BLOCK_TOL, format!("max gap {gap:.2e} <= {BLOCK_TOL}"));

    let d = mde_density(&flat, DensityOptions::default()).unwrap();
    let worst = (0..=360).map(|k| -1.8 + 0.01 * k as f64).map(|x| (d.measure.density(x) - sc.density(x)).abs()).fold(0.0, f64::max);
    t.line("5 mde density in bulk [-1.8,1.8]", worst <= DENSITY_TOL, format!("sup error {worst:.2e} <= {DENSITY_TOL}"));
}

fn criterion_6(t: &mut Tally) {
    let sc = ReferenceMeasure::semicircle(1.0);
    let target = ReferenceMeasure::semicircle(2f64.sqrt());
    let fc = FreeConvolution::new(sc.clone(), sc.clone());
    let worst = (0..=800)
        .map(|k| Complex64::new(-4.0 + 0.01 * k as f64, 0.1))
        .map(|z| (fc.stieltjes(z).unwrap() - target.stieltjes(z)).norm())
        .fold(0.0, f64::max);
    t.line("6 sc+sc vs sc(sqrt2) stieltjes", worst <= FREECONV_TOL, format!("max error {worst:.2e} <= {FREECONV_TOL}"));

    let n = 400;
    let q: Vec<f64> = (0..n).map(|i| sc.quantile((i as f64 + 0.5) / n as f64)).collect();
    let spec = EnsembleSpec::FreeAddition { a_diag: q.clone(), b_diag: q, shift: 0.0 };
    let (_, est) = growth_samples(&spec, 40, SEED).unwrap();
    let oracle = target.log_potential(0.0);
    t.growth.push(("6 free addition".into(), est.mean_of_logs, est.log_mean_exp));
    t.line(
        "6 free addition N=400",
        (est.mean_of_logs - oracle).abs() <= FREE_ADDITION_TOL,
        format!("estimate {:.4} ± {:.4}  oracle {oracle:.4}  tol {FREE_ADDITION_TOL}", est.mean_of_logs, est.mean_of_logs_stderr),
    );
}

/// `(argmax, max)` of `Φ(u) - αu²` for the shifted semicircle on a uniform
/// grid, refined by golden section in the winning cell.
fn grid_oracle(alpha: f64) -> (f64, f64) {
    let sc = ReferenceMeasure::semicircle(1.0);
    let f = |u: f64| sc.log_potential(-u) - alpha * u * u;
    let (lo, hi, m) = (0.0, 8.0, 80_000);
    let h = (hi - lo) / m as f64;
    let k = (0..=m).max_by(|&a, &b| f(lo + h * a as f64).total_cmp(&f(lo + h * b as f64))).unwrap();
    let (mut a, mut b) = ((lo + h * (k as f64 - 1.0)).max(lo), (lo + h * (k as f64 + 1.0)).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let u = 0.5 * (a + b);
    (u, f(u).max(f(lo + h * k as f64)))
}

fn criterion_7(t: &mut Tally) {
    let proto = |alpha: f64| VarProblem::new(MeasureFamily::shifted_semicircle(), alpha, Domain::whole()).unwrap();
    for alpha in [0.5, 0.125] {
        let s = solve_unrestricted(&proto(alpha)).unwrap();
        let (u, v) = grid_oracle(alpha);
        let ok = (s.u[0].abs() - u).abs() <= 1e-5 && (s.value - v).abs() <= VARIATIONAL_TOL;
        t.line(
            &format!("7 unrestricted alpha={alpha}"),
            ok,
            format!("|u*| {:.6} value {:.8}  grid oracle |u*| {u:.6} value {v:.8}", s.u[0].abs(), s.value),
        );
        if alpha == 0.125 {
            let ok = (s.u[0].abs() - 2.0).abs() <= VARIATIONAL_TOL && s.value.abs() <= VARIATIONAL_TOL;
            t.known("7 alpha=1/8 stated as (|u*|=2, 0.0)", ok, format!("|u*| {:.6} value {:.6}", s.u[0].abs(), s.value));
        }
    }

    let grid: Vec<f64> = (0..1601).map(|k| -4.0 + 0.005 * k as f64).collect();
    let r = laplace_crosscheck(&proto(0.5), |u| EnsembleSpec::goe(200).with_shift(-u), &grid, 100, SEED, LAPLACE_TOL).unwrap();
    t.report("7 laplace N=200 alpha=1/2", &r.unrestricted);

    for alpha in [0.01, 10.0] {
        let r = solve_restricted(&proto(alpha)).unwrap();
        t.line(
            &format!("7 restricted trace alpha={alpha}"),
            r.is_monotone(MONOTONE_TOL) && !r.trace.is_empty(),
            format!("{} steps, last eps value {:.8}, limit {:.8} at u {:.6}", r.trace.len(), r.trace.last().map_or(f64::NAN, |x| x.value), r.solution.value, r.solution.u[0]),
        );
    }
}

fn criterion_8(t: &mut Tally) {
    for rho in [0.0, 0.5, 1.0] {
        let r = product_factoring(rho, 2, 300, 100, SEED, PRODUCT_TOL).unwrap();
        t.report(&format!("8 products rho={rho}"), &r);
    }
}

fn criterion_9(t: &mut Tally) {
    let cases = [
        ("pareto(1.5)", EntryDistribution::pareto(1.5), TailClass::Heavy),
        ("gaussian", EntryDistribution::gaussian(), TailClass::Stable),
        ("student_t(5)", EntryDistribution::student_t(5.0), TailClass::Stable),
    ];
    for (name, dist, want) in cases {
        let m = moment_transition(1.0, dist, 20, 10_000, SEED).unwrap();
        t.line(
            &format!("9 moments {name}"),
            m.class == want,
            format!("{:?} (want {want:?})  max share {:.3}  hill {:.2}", m.class, m.max_share, m.hill_index),
        );
    }
    let (ok, worst) = concavity_random_triples(100, 10_000, SEED);
    t.line("9 lemma B.2 concavity", ok == 100, format!("{ok}/100 triples, largest second difference {worst:.1e} <= {CONCAVITY_TOL}"));
    let h = hadamard_check(12, 100, SEED);
    t.line("9 hadamard bound", h == 100, format!("{h}/100"));
}

fn criterion_10(t: &mut Tally) {
    let mut worst3: f64 = 0.0;
    let mut worst5: f64 = 0.0;
    let mut curvature = 0;
    for e in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        let d = decomposition_check(e, 0.05, 20.0, 4.0, 20_001).unwrap();
        worst3 = worst3.max(d.convex3_residual);
        worst5 = worst5.max(d.convex5_residual);
        curvature += d.curvature_violations;
    }
    t.line("10 convex3 identity", worst3 <= IDENTITY_TOL, format!("max residual {worst3:.1e}"));
    t.line("10 convex5 identity (relative)", worst5 <= IDENTITY_TOL, format!("max residual {worst5:.1e}"));
    t.line("10 curvature signs", curvature == 0, format!("{curvature} violations"));
    let schur = schur_identity_check(20, 100, SEED).unwrap();
    t.line("10 schur resolvent identity", schur <= IDENTITY_TOL, format!("max relative gap {schur:.1e}"));
    let tr = truncation_stability_check(&EnsembleSpec::goe(200), 0.1, 100, SEED, 1.0).unwrap();
    let held = tr.value("rank_bound_holds").unwrap_or(0.0);
    t.line("10 truncation ks <= rank/N", held == 100.0, format!("{held}/100 samples"));

    let mut rng = rng_from_seed(derive_seed(SEED, "acceptance-distances", 0));
    let sc = ReferenceMeasure::semicircle(1.0);
    let mut bad = 0;
    for _ in 0..100 {
        let a = EmpiricalMeasure::new((0..30).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect());
        let shift = rng.random::<f64>() * 4.0;
        let b = EmpiricalMeasure::new((0..20).map(|_| rng.random::<f64>() * 2.0 + shift).collect());
        for (bl, w1) in [(bl_distance(&a, &b), w1_distance(&a, &b)), (bl_distance(&a, &sc), w1_distance(&a, &sc))] {
            if !(bl <= w1 + 1e-12 && bl <= 2.0) {
                bad += 1;
            }
        }
    }
    t.line("10 d_BL <= W1 and d_BL <= 2", bad == 0, format!("{bad} violations in 200 pairs"));

    let worse: Vec<&String> = t.growth.iter().filter(|(_, m, l)| !(l >= m)).map(|g| &g.0).collect();
    let count = t.growth.len();
    t.line("10 log-mean-exp >= mean-of-logs", worse.is_empty(), format!("{} of {count} runs violate", worse.len()));
}

fn criterion_11(t: &mut Tally) {
    let r = counterexample_runs(Counterexample::Outlier { theta: 0.125 }, 256, EntryDistribution::gaussian(), 50, SEED, COUNTEREXAMPLE_TOL).unwrap();
    t.line(
        "11 outlier theta=1/8 N=256",
        r.passed,
        format!("estimate {:.4}  excess {:.4} >= {OUTLIER_EXCESS}", r.estimate, r.estimate - r.oracle),
    );
    let k = counterexample_runs(Counterexample::Kernel, 100, EntryDistribution::gaussian(), 10_000, SEED, COUNTEREXAMPLE_TOL).unwrap();
    let hits = k.value("hits").unwrap_or(0.0);
    let share = k.value("hit_share").unwrap_or(0.0);
    t.line("11 kernel hit samples dominate", hits > 0.0 && share >= KERNEL_HIT_SHARE, format!("{hits} hits carry {share:.6} of the sum (>= {KERNEL_HIT_SHARE})"));
    t.line(
        "11 kernel no-hit estimate",
        (k.estimate - k.oracle).abs() <= COUNTEREXAMPLE_TOL,
        format!("estimate {:.4} ± {:.4}  oracle {:.4}  tol {COUNTEREXAMPLE_TOL}", k.estimate, k.stderr, k.oracle),
    );
}

/// Summaries of a few cheap runs, serialized the way the command line does.
fn summaries() -> String {
    let reports = vec![
        estimate_det_growth(&EnsembleSpec::goe(100), 40, SEED, WIGNER_TOL).unwrap(),
        dembo_exact_check(4, 8, EntryDistribution::rademacher(), 5_000, SEED).unwrap(),
        product_factoring(0.5, 2, 60, 30, SEED, PRODUCT_TOL).unwrap(),
        counterexample_runs(Counterexample::Kernel, 30, EntryDistribution::gaussian(), 300, SEED, 0.2).unwrap(),
        moment_transition(1.0, EntryDistribution::student_t(5.0), 12, 500, SEED).unwrap().report,
        wegner_gap_probability(&EnsembleSpec::goe(80), 0.0, 0.01, 60, SEED, 0.1).unwrap(),
    ];
    serde_json::to_string_pretty(&reports).unwrap()
}

fn criterion_12(t: &mut Tally) {
    let run = |threads: usize| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(summaries);
    let one = run(1);
    for threads in [2, 4] {
        let other = run(threads);
        t.line(&format!("12 byte-identical 1 vs {threads} threads"), one == other, format!("{} bytes", one.len()));
    }
}

fn main() {
    let start = Instant::now();
    let mut t = Tally { failed: Vec::new(), known: Vec::new(), passed: 0, growth: Vec::new() };
    criterion_1(&mut t);
    criterion_2(&mut t);
    criterion_3(&mut t);
    criterion_4(&mut t);
    criterion_5(&mut t);
    criterion_6(&mut t);
    criterion_7(&mut t);
    criterion_8(&mut t);
    criterion_9(&mut t);
    criterion_11(&mut t);
    criterion_10(&mut t);
    criterion_12(&mut t);
    println!(
        "\nacceptance: {} passed, {} failed, {} known failures, {:.0} s",
        t.passed,
        t.failed.len(),
        t.known.len(),
        start.elapsed().as_secs_f64()
    );
    for k in &t.known {
        println!("known: {k}");
    }
    if !t.failed.is_empty() {
        for f in &t.failed {
            println!("failed: {f}");
        }
        std::process::exit(1);
    }
}
