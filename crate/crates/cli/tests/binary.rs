use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn evref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evref")).args(args).env_remove("EVREF_CONFIG").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn refusal_exits_nonzero_with_reason() {
    let out = evref(&["fit", "--model", "gev", "--prior", "uniform_gev", "--input", &data("single_maximum.txt")]);
    assert_eq!(out.status.code(), Some(evref_cli::EXIT_REFUSED as i32));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("single block maximum"), "{err}");
    assert!(!err.to_lowercase().contains("theorem"), "{err}");

    let out = evref(&["fit", "--prior", "mdi_gp", "--input", &data("excesses.txt")]);
    assert_eq!(out.status.code(), Some(evref_cli::EXIT_REFUSED as i32));
    assert!(String::from_utf8_lossy(&out.stderr).contains("improper"));
}

#[test]
fn override_allows_sampling_and_is_recorded() {
    let out = evref(&["fit", "--prior", "uniform_gp", "--input", &data("two_excesses.txt")]);
    assert_eq!(out.status.code(), Some(evref_cli::EXIT_REFUSED as i32));
    assert!(String::from_utf8_lossy(&out.stderr).contains("override"));
    let out = evref(&[
        "fit", "--prior", "uniform_gp", "--input", &data("two_excesses.txt"), "--iterations", "2000", "--burn-in", "500",
        "--override-propriety",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report(&out)["propriety_override"].is_string());
}

#[test]
fn errors_exit_with_one() {
    let out = evref(&["ingest", "--input", &data("tied.txt")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tied"));
    let out = evref(&["ingest", "--input", &data("does_not_exist.txt")]);
    assert_eq!(out.status.code(), Some(1));
    let out = evref(&["fit", "--prior", "jeffreys_gp", "--xi-upper", "2", "--input", &data("excesses.txt")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_evref"))
        .args(["fit", "--input", &data("gp40.txt"), "--seed", "5"])
        .env("EVREF_CONFIG", data("fit.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["prior"]["family"], "mdi_gp_trunc");
    assert_eq!(r["mcmc"]["iterations"], 1500);
    assert_eq!(r["mcmc"]["seed"], 5);
}

#[test]
fn deterministic_output() {
    let args = ["fit", "--config", &data("fit.toml"), "--input", &data("gp40.txt"), "--chains", "2"];
    let (a, b) = (evref(&args), evref(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_then_fit_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.txt");
    let path = path.to_str().unwrap();
    let out = evref(&["simulate", "--model", "gev", "--mu", "5", "--sigma", "2", "--xi", "0.1", "--count", "400", "--seed", "9", "--output", path]);
    assert_eq!(out.status.code(), Some(0));
    let out = evref(&["fit", "--prior", "mdi_gev_trunc", "--input", path, "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    for (name, truth) in [("mu", 5.0), ("sigma", 2.0), ("xi", 0.1)] {
        let s = &r["summaries"][name];
        let (mean, sd) = (s["mean"].as_f64().unwrap(), s["sd"].as_f64().unwrap());
        assert!((mean - truth).abs() < 3.0 * sd, "{name}: {mean} +- {sd}");
    }
}

#[test]
fn theorems_exit_zero_when_all_rows_pass() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("theorems.tsv");
    let out = evref(&["theorems", "--output", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["all_pass"], true);
    assert!(r["rows"].as_array().unwrap().len() >= 40);
    assert!(std::fs::read_to_string(table).unwrap().starts_with("claim\tprior"));
}
