//! `detlab`: command-line driver for the determinant-growth experiments.

mod args;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use args::*;
use commands::{CmdError, Ctx, Outcome};
use config::{ensure_writable, RunConfig, DEFAULT_SEED};

const OUTPUT_HELP: &str = "\
Output:
  A JSON summary is printed to stdout. With --out DIR it is also written to
  DIR/summary.json together with the CSV files below.

  summary.json  schema_version, command, seed, params, passed, result
  report.csv    name, spec_hash, n, samples, estimate, stderr, log_mean_exp,
                log_mean_exp_stderr, oracle, tolerance, passed
  samples.csv   index, seed, sign, log_abs_det          (detgrowth --per-sample)
  density.csv   x, density                              (mde/freeconv --density)
  stieltjes.csv re_z, im_z, re_tr_m_over_n, im_tr_m_over_n    (mde --density)
  curve.csv     u, s_alpha, class                       (variational)
  trace.csv     eps, u, value                           (variational --restricted)
  grid.csv      u, growth, growth_stderr, pd_fraction, log_integrand,
                log_integrand_restricted                (laplace)
  running_mean.csv  samples, log_mean                   (moments)

Seeds:
  Sample k of a run uses derive_seed(seed, subcommand, k), so growing the
  sample count leaves earlier samples unchanged. The default seed is 20240601.

Exit codes:
  0 pass, 1 acceptance failure, 2 usage error, 3 numerical error";

#[derive(Parser)]
#[command(name = "detlab", version, about = "Monte Carlo and deterministic checks of random determinant growth rates", after_help = OUTPUT_HELP)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for summary.json and CSV output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Validate and print the resolved plan without sampling
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// (1/N) log|det(H - E)| against the log-potential of the reference measure
    Detgrowth(DetgrowthArgs),
    /// Mean of det((1/N) Y Yᵀ) against N!/(N^p (N-p)!)
    Dembo(DemboArgs),
    /// Probability of an eigenvalue in [E - δ, E + δ]
    Wegner(WegnerArgs),
    /// Solve the Matrix Dyson Equation at one spectral parameter
    Mde(MdeArgs),
    /// Free additive convolution through subordination
    Freeconv(FreeconvArgs),
    /// Maximize S_α[u] over a domain, optionally restricted to the good set
    Variational(VariationalArgs),
    /// Monte Carlo Laplace integral against the variational supremum
    Laplace(LaplaceArgs),
    /// Products of correlated determinants
    Products(ProductsArgs),
    /// Running mean of |det|^p and its heavy/stable classification
    Moments(MomentsArgs),
    /// Exact identities: log decompositions, Schur, Hadamard, concavity, rank bound
    DecompTest(DecompArgs),
    /// Models violating one assumption each
    Counterexample(CounterexampleArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Detgrowth(_) => "detgrowth",
            Command::Dembo(_) => "dembo",
            Command::Wegner(_) => "wegner",
            Command::Mde(_) => "mde",
            Command::Freeconv(_) => "freeconv",
            Command::Variational(_) => "variational",
            Command::Laplace(_) => "laplace",
            Command::Products(_) => "products",
            Command::Moments(_) => "moments",
            Command::DecompTest(_) => "decomp-test",
            Command::Counterexample(_) => "counterexample",
        }
    }
}

fn usage_exit(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run_command(cmd: &Command, cfg: &RunConfig, ctx: &Ctx<'_>) -> Result<Outcome, CmdError> {
    let name = cmd.name();
    let merge = |e: String| CmdError::Usage(e);
    match cmd {
        Command::Detgrowth(a) => commands::detgrowth(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Dembo(a) => commands::dembo(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Wegner(a) => commands::wegner(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Mde(a) => commands::mde(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Freeconv(a) => commands::freeconv(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Variational(a) => commands::variational(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Laplace(a) => commands::laplace(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Products(a) => commands::products(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Moments(a) => commands::moments(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::DecompTest(a) => commands::decomp_test(ctx, &cfg.merge_params(name, a).map_err(merge)?),
        Command::Counterexample(a) => commands::counterexample(ctx, &cfg.merge_params(name, a).map_err(merge)?),
    }
}

fn write_outputs(dir: &std::path::Path, summary: &Value, files: &[(String, Vec<u8>)]) -> Result<(), String> {
    detlab::output::write_json(&dir.join("summary.json"), summary).map_err(|e| e.to_string())?;
    for (name, bytes) in files {
        std::fs::write(dir.join(name), bytes).map_err(|e| format!("cannot write {name}: {e}"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => return usage_exit(&e),
        },
        None => RunConfig::default(),
    };
    let command = match (cli.command, &cfg.command) {
        (Some(c), Some(named)) if c.name() != named => {
            return usage_exit(&format!("config is for {named:?} but {:?} was requested", c.name()));
        }
        (Some(c), _) => c,
        (None, Some(named)) => {
            let mut args = argv.clone();
            args.push(named.clone());
            match Cli::try_parse_from(&args) {
                Ok(Cli { command: Some(c), .. }) => c,
                _ => return usage_exit(&format!("config names unknown command {named:?}")),
            }
        }
        (None, None) => return usage_exit("no subcommand given; see --help"),
    };

    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let threads = cli.threads.or(cfg.threads);
    let out = cli.out.clone().or_else(|| cfg.out.clone());
    if let Some(t) = threads {
        if t == 0 {
            return usage_exit("--threads must be at least 1");
        }
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return usage_exit(&format!("cannot start thread pool: {e}"));
        }
    }
    if let Some(dir) = &out {
        if let Err(e) = ensure_writable(dir) {
            return usage_exit(&e);
        }
    }

    let ctx = Ctx { seed, dry_run: cli.dry_run, config: &cfg };
    let name = command.name();
    match run_command(&command, &cfg, &ctx) {
        Ok(o) => {
            let summary = json!({
                "schema_version": detlab::output::SCHEMA_VERSION,
                "command": name,
                "seed": seed,
                "params": o.params,
                "passed": o.passed,
                "result": o.result,
            });
            println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
            if let (Some(dir), false) = (&out, cli.dry_run) {
                if let Err(e) = write_outputs(dir, &summary, &o.files) {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            }
            ExitCode::from(if o.passed { 0 } else { 1 })
        }
        Err(CmdError::Usage(msg)) => usage_exit(&msg),
        Err(CmdError::Numeric(e)) => {
            let record = json!({
                "schema_version": detlab::output::SCHEMA_VERSION,
                "command": name,
                "seed": seed,
                "error": { "kind": e.kind(), "message": e.to_string() },
            });
            eprintln!("{}", serde_json::to_string_pretty(&record).expect("serializable"));
            if let Some(dir) = &out {
                let _ = detlab::output::write_json(&dir.join("error.json"), &record);
            }
            ExitCode::from(3)
        }
    }
}
