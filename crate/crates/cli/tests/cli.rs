use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn detlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detlab")).args(args).output().unwrap()
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("detlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn flat_goe_mde_matches_semicircle() {
    let out = detlab(&["mde", "--flat-goe", "--z-imag", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["schema_version"], 1);
    let im = s["result"]["m"]["im"].as_f64().unwrap();
    assert!((im - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
}

#[test]
fn dembo_run_hits_the_formula() {
    let out = detlab(&["--seed", "3", "dembo", "--n", "4", "--p", "2", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(summary(&out)["result"]["oracle"], 0.75);
}

#[test]
fn output_does_not_depend_on_threads() {
    let one = detlab(&["--seed", "5", "--threads", "1", "detgrowth", "--n", "40", "--samples", "30", "--tolerance", "0.2"]);
    let two = detlab(&["--seed", "5", "--threads", "2", "detgrowth", "--n", "40", "--samples", "30", "--tolerance", "0.2"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn writes_summary_and_csv_files() {
    let dir = scratch("files");
    let out = detlab(&["--out", dir.to_str().unwrap(), "variational", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(written, summary(&out));
    let curve = std::fs::read_to_string(dir.join("curve.csv")).unwrap();
    assert!(curve.starts_with("u,s_alpha,class"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn dry_run_samples_nothing() {
    let dir = scratch("dry");
    let out = detlab(&["--dry-run", "--out", dir.to_str().unwrap(), "detgrowth", "--n", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["result"]["dry_run"], true);
    assert!(!dir.join("report.csv").exists());
}

#[test]
fn config_file_supplies_command_and_spec() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        "command = \"detgrowth\"\nseed = 9\n\n[spec]\nmodel = \"wigner\"\nn = 30\ndist = { kind = \"rademacher\" }\n\n[params]\nsamples = 30\ntolerance = 0.3\n",
    )
    .unwrap();
    let out = detlab(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out);
    assert_eq!(s["seed"], 9);
    assert_eq!(s["params"]["spec"]["dist"]["kind"], "rademacher");
    std::fs::write(&path, "command = \"detgrowth\"\nsede = 9\n").unwrap();
    assert_eq!(detlab(&["--config", path.to_str().unwrap()]).status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exit_codes() {
    assert_eq!(detlab(&["bogus"]).status.code(), Some(2));
    assert_eq!(detlab(&["products", "--rho", "1.5"]).status.code(), Some(2));
    assert_eq!(detlab(&[]).status.code(), Some(2));
    assert_eq!(detlab(&["detgrowth", "--n", "20", "--samples", "5"]).status.code(), Some(2));
    assert_eq!(detlab(&["detgrowth", "--model", "d-regular", "--n", "5", "--degree", "3"]).status.code(), Some(2));
    // A tolerance of zero cannot be met by a Monte Carlo estimate.
    let fail = detlab(&["detgrowth", "--n", "20", "--samples", "30", "--tolerance", "0"]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(summary(&fail)["passed"], false);
}
