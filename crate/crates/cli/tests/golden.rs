//! Report documents on canonical inputs, compared with checked-in golden files.
//! Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::PathBuf;

use clap::Parser;
use evref_cli::{run, Cli, FORMAT_VERSION};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn check(name: &str, args: &[&str]) -> evref_cli::Outcome {
    let mut argv = vec!["evref"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(&argv).unwrap();
    let out = run(&cli).unwrap();
    assert_eq!(out.report["format_version"], FORMAT_VERSION);
    let mut text = serde_json::to_string_pretty(&out.report).unwrap();
    text.push('\n');
    if let Some(side) = &out.side_file {
        text.push_str("---\n");
        text.push_str(side);
    }
    let path = golden_dir().join(format!("{name}.golden"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).unwrap();
    } else {
        let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert!(want == text, "{name} differs from {}", path.display());
    }
    out
}

#[test]
fn ingest_raw_threshold() {
    let out = check("ingest_raw_threshold", &["ingest", "--input", &data("raw.txt"), "--threshold", "1.0"]);
    assert_eq!(out.report["count"], 5);
}

#[test]
fn ingest_raw_blocks() {
    let out = check("ingest_raw_blocks", &["ingest", "--input", &data("raw.txt"), "--block-size", "3"]);
    assert_eq!(out.report["values"], serde_json::json!([3.0, 4.4]));
}

#[test]
fn priors_figure_data() {
    let out = check("priors_gp", &["priors", "--model", "gp", "--xi-min", "-3", "--xi-max", "3", "--points", "13"]);
    let mdi = &out.report["curves"][1]["scaled"];
    let v: Vec<f64> = mdi.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]));
    let out = check("priors_uniform", &["priors", "--prior", "uniform_gev", "--points", "5"]);
    assert!(out.report["curves"][0]["scaled"].as_array().unwrap().iter().all(|x| x == 1.0));
    check("priors_gev", &["priors", "--model", "gev", "--xi-min", "-0.499", "--xi-max", "2", "--points", "11"]);
}

#[test]
fn propriety_reports() {
    let out = check("propriety_gp", &["propriety", "--prior", "mdi_gp_trunc", "--input", &data("excesses.txt")]);
    assert_eq!(out.report["verdict"]["status"], "proper");
    assert_eq!(out.exit_code, 0);
    let out = check("propriety_gev", &["propriety", "--prior", "mdi_gev", "--input", &data("maxima.txt")]);
    assert_eq!(out.report["verdict"]["status"], "divergent");
    assert_eq!(out.report["established"]["status"], "improper");
    assert_eq!(out.exit_code, 0);
}

#[test]
fn simulate_and_fit() {
    let out = check("simulate_gp", &["simulate", "--model", "gp", "--sigma", "1.5", "--xi", "0.1", "--count", "40", "--seed", "3"]);
    let simulated = fs::read_to_string(data("gp40.txt")).unwrap();
    assert_eq!(out.side_file.as_deref(), Some(simulated.as_str()));
    let out = check("fit_gp", &["fit", "--config", &data("fit.toml"), "--input", &data("gp40.txt")]);
    assert_eq!(out.report["mcmc"]["seed"], 21);
    check(
        "return_level_gev",
        &[
            "return-level", "--prior", "mdi_gev_trunc", "--input", &data("gev30.txt"), "--iterations", "1500",
            "--burn-in", "500", "--period", "10,100",
        ],
    );
}
