//! One function per subcommand. Each returns a JSON report, a short
//! human-readable summary and an optional columnar side file.

use std::fmt::Write as _;
use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use evref::evd::{gev_sample, gp_sample};
use evref::ingest::{build_sample, parse_column, IngestMode, ModeName, Sample};
use evref::mcmc::{diagnostics, return_level, sample, Chain, FitData, Summary};
use evref::priors::{catalog, xi_curve};
use evref::propriety::{
    appendix_bound_suite, estimate_gev_const, estimate_gp_const, known_propriety, theorem_suite, FitModel,
    KnownPropriety, Status,
};
use evref::{BlockMaximaSample, ExcessSample, GevParams, GpParams, NhppData, PriorFamily, PriorSpec};

use crate::config::RunConfig;

/// Version of the report layout.
pub const FORMAT_VERSION: u32 = 1;

/// Exit status when a verdict or theorem row disagrees with what is expected.
pub const EXIT_UNEXPECTED: u8 = 3;

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    /// Contents for `--output`, when the command has a columnar result.
    pub side_file: Option<String>,
    pub exit_code: u8,
}

impl Outcome {
    fn new(command: &str, mut body: Value, summary: String, side_file: Option<String>) -> Outcome {
        let mut report = json!({ "format_version": FORMAT_VERSION, "command": command });
        report.as_object_mut().unwrap().append(body.as_object_mut().unwrap());
        Outcome { report, summary, side_file, exit_code: 0 }
    }
}

fn read_values(cfg: &RunConfig) -> Result<Vec<f64>> {
    let path = cfg.input.as_ref().ok_or_else(|| anyhow!("--input is required"))?;
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_column(&text)?)
}

fn ingest_mode(cfg: &RunConfig) -> Result<IngestMode> {
    let name = match cfg.mode {
        Some(m) => m,
        None if cfg.threshold.is_some() => ModeName::RawThreshold,
        None if cfg.block_size.is_some() => ModeName::RawBlocks,
        None if matches!(cfg.model, Some(FitModel::Gev)) => ModeName::Maxima,
        None => ModeName::Excesses,
    };
    Ok(name.with_params(cfg.threshold, cfg.block_size)?)
}

fn column(header: &str, values: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn ingest(cfg: &RunConfig) -> Result<Outcome> {
    let values = read_values(cfg)?;
    let mode = ingest_mode(cfg)?;
    let s = build_sample(&values, mode)?;
    let kind = match s {
        Sample::Excesses(_) => "excesses",
        Sample::Maxima(_) => "maxima",
    };
    let summary = format!(
        "{} {kind} from {} raw values (mode {mode}); range [{}, {}]",
        s.len(),
        values.len(),
        s.values()[0],
        s.values()[s.len() - 1]
    );
    let body = json!({
        "mode": mode,
        "kind": kind,
        "raw_count": values.len(),
        "count": s.len(),
        "values": s.values(),
    });
    Ok(Outcome::new("ingest", body, summary, Some(column(kind, s.values()))))
}

fn default_families(model: Option<FitModel>) -> Vec<PriorFamily> {
    use PriorFamily::*;
    match model {
        Some(FitModel::Gp) => vec![JeffreysGp, MdiGp],
        Some(_) => vec![JeffreysGev, MdiGev],
        None => vec![JeffreysGp, MdiGp, JeffreysGev, MdiGev],
    }
}

pub fn priors(cfg: &RunConfig) -> Result<Outcome> {
    let specs: Vec<PriorSpec> = match cfg.prior {
        Some(p) => vec![p],
        None => default_families(cfg.model).into_iter().map(PriorSpec::new).collect::<evref::Result<_>>()?,
    };
    let (lo, hi, n) = cfg.grid;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let curves: Vec<_> = specs.iter().map(|s| (s, xi_curve(s, &grid))).collect();

    let mut table = String::from("xi");
    for (s, _) in &curves {
        let _ = write!(table, "\t{}", s.family);
    }
    table.push('\n');
    for (i, xi) in grid.iter().enumerate() {
        let _ = write!(table, "{xi}");
        for (_, c) in &curves {
            let _ = write!(table, "\t{}", c[i].scaled);
        }
        table.push('\n');
    }
    let entries = catalog();
    let body = json!({
        "grid": { "xi_min": lo, "xi_max": hi, "points": n },
        "curves": curves.iter().map(|(s, c)| json!({
            "prior": s,
            "catalog": entries.iter().find(|e| e.family == s.family.name()),
            "xi": c.iter().map(|p| p.xi).collect::<Vec<_>>(),
            "density": c.iter().map(|p| p.density).collect::<Vec<_>>(),
            "scaled": c.iter().map(|p| p.scaled).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    let names: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
    let summary = format!("xi-components of {} on {n} points over [{lo}, {hi}], scaled to a maximum of 1", names.join(", "));
    Ok(Outcome::new("priors", body, summary, Some(table)))
}

fn require_prior(cfg: &RunConfig) -> Result<(FitModel, PriorSpec)> {
    let prior = cfg.prior.ok_or_else(|| anyhow!("--prior is required"))?;
    Ok((cfg.model.unwrap_or(FitModel::Gp), prior))
}

fn known_json(k: &KnownPropriety) -> Value {
    let (status, reason) = match k {
        KnownPropriety::Proper(r) => ("proper", r),
        KnownPropriety::Improper(r) => ("improper", r),
        KnownPropriety::Unsettled(r) => ("unsettled", r),
    };
    json!({ "status": status, "reason": reason })
}

pub fn propriety(cfg: &RunConfig) -> Result<Outcome> {
    let (model, prior) = require_prior(cfg)?;
    let values = read_values(cfg)?;
    let sample = build_sample(&values, ingest_mode(cfg)?)?;
    let verdict = match (model, &sample) {
        (FitModel::Gp, Sample::Excesses(s)) => estimate_gp_const(s, &prior, &cfg.quad)?,
        (FitModel::Gev, Sample::Maxima(s)) => estimate_gev_const(s, &prior, &cfg.quad)?,
        (FitModel::Nhpp, _) => bail!("the propriety lab covers the gp and gev models"),
        _ => bail!("the ingest mode does not produce data for the {model} model"),
    };
    let known = known_propriety(model, &prior, sample.len(), None)?;
    let agrees = match (&known, verdict.status) {
        (_, Status::Inconclusive) => false,
        (KnownPropriety::Proper(_), s) => s == Status::Proper,
        (KnownPropriety::Improper(_), s) => s == Status::Divergent,
        (KnownPropriety::Unsettled(_), _) => true,
    };
    let mut table = String::from("truncation\tln_partial\tln_completed\n");
    for p in &verdict.partial_integrals {
        let completed = p.ln_completed.map_or("nan".to_string(), |v| v.to_string());
        let _ = writeln!(table, "{}\t{}\t{completed}", p.truncation, p.ln_value);
    }
    let status = serde_json::to_value(verdict.status)?;
    let summary = format!(
        "{model} posterior, prior {prior}, n = {}: {} ({})",
        sample.len(),
        status.as_str().unwrap_or_default(),
        verdict.evidence
    );
    let body = json!({
        "model": model,
        "prior": prior,
        "data": sample.values(),
        "quadrature": cfg.quad,
        "verdict": verdict,
        "established": known_json(&known),
        "agrees_with_established": agrees,
    });
    let mut out = Outcome::new("propriety", body, summary, Some(table));
    if !agrees {
        out.exit_code = EXIT_UNEXPECTED;
    }
    Ok(out)
}

fn strip_key(v: &mut Value, key: &str) {
    match v {
        Value::Object(m) => {
            m.remove(key);
            m.values_mut().for_each(|x| strip_key(x, key));
        }
        Value::Array(a) => a.iter_mut().for_each(|x| strip_key(x, key)),
        _ => {}
    }
}

pub fn theorems(cfg: &RunConfig) -> Result<Outcome> {
    let report = theorem_suite(&cfg.quad)?;
    let appendix = appendix_bound_suite(
        &ExcessSample::new(0.0, vec![1.0, 2.0, 3.0])?,
        &BlockMaximaSample::new(vec![0.0, 1.0, 2.0, 4.0])?,
    )?;
    let pass = report.all_pass() && appendix.all_hold();
    let mut table = String::from("claim\tprior\tn\tdataset\texpected\tobserved\testimate\tbound_holds\tpass\n");
    for r in &report.rows {
        let _ = writeln!(
            table,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.claim,
            r.prior,
            r.sample_size,
            r.dataset,
            serde_json::to_value(r.expected)?.as_str().unwrap_or_default(),
            serde_json::to_value(r.observed)?.as_str().unwrap_or_default(),
            r.estimate.map_or("-".to_string(), |e| e.to_string()),
            r.bound_holds.map_or("-".to_string(), |b| b.to_string()),
            r.pass
        );
    }
    let failed = report.rows.iter().filter(|r| !r.pass).count();
    let mut summary = format!(
        "{} rows, {failed} failed; truncated Jeffreys checks {}/{}; appendix bounds {}/{} hold; {:.1} s",
        report.rows.len(),
        report.truncated_jeffreys.iter().filter(|c| c.holds).count(),
        report.truncated_jeffreys.len(),
        appendix.lines.iter().filter(|l| l.holds).count(),
        appendix.lines.len(),
        report.seconds
    );
    for r in report.rows.iter().filter(|r| !r.pass) {
        let _ = write!(summary, "\nFAILED: {} ({}, n = {}): {}", r.claim, r.prior, r.sample_size, r.evidence);
    }
    let mut rows = serde_json::to_value(&report.rows)?;
    strip_key(&mut rows, "seconds");
    let body = json!({
        "all_pass": pass,
        "rows": rows,
        "truncated_jeffreys": report.truncated_jeffreys,
        "appendix_bounds": appendix,
    });
    let mut out = Outcome::new("theorems", body, summary, Some(table));
    if !pass {
        out.exit_code = EXIT_UNEXPECTED;
    }
    Ok(out)
}

/// Data and chains of a fit.
struct Fit {
    model: FitModel,
    prior: PriorSpec,
    data: Vec<f64>,
    n_blocks: Option<usize>,
    chains: Vec<Chain>,
}

fn run_fit(cfg: &RunConfig) -> Result<Fit> {
    let (model, prior) = require_prior(cfg)?;
    let values = read_values(cfg)?;
    let (data, n_blocks, chains) = match model {
        FitModel::Nhpp => {
            let u = cfg.threshold.ok_or_else(|| anyhow!("the nhpp model needs --threshold"))?;
            let n_blocks = cfg.n_blocks.or(cfg.block_size.map(|b| values.len() / b));
            let d = NhppData::from_raw(&values, u, n_blocks)?;
            let chains = sample(FitData::Nhpp(&d), &prior, &cfg.mcmc, cfg.override_propriety)?;
            (d.values().to_vec(), Some(d.n_blocks()), chains)
        }
        _ => match build_sample(&values, ingest_mode(cfg)?)? {
            Sample::Excesses(s) if model == FitModel::Gp => {
                let chains = sample(FitData::Gp(&s), &prior, &cfg.mcmc, cfg.override_propriety)?;
                (s.values().to_vec(), None, chains)
            }
            Sample::Maxima(s) if model == FitModel::Gev => {
                let chains = sample(FitData::Gev(&s), &prior, &cfg.mcmc, cfg.override_propriety)?;
                (s.values().to_vec(), None, chains)
            }
            _ => bail!("the ingest mode does not produce data for the {model} model"),
        },
    };
    Ok(Fit { model, prior, data, n_blocks, chains })
}

fn chains_table(chains: &[Chain]) -> String {
    let mut out = String::new();
    for (k, c) in chains.iter().enumerate() {
        for (i, line) in c.to_columns().lines().enumerate() {
            if i == 0 {
                if k == 0 {
                    let _ = writeln!(out, "chain\t{line}");
                }
            } else {
                let _ = writeln!(out, "{k}\t{line}");
            }
        }
    }
    out
}

fn fit_header(fit: &Fit, cfg: &RunConfig) -> Result<Value> {
    let size = fit.data.len();
    let known = known_propriety(fit.model, &fit.prior, size, fit.n_blocks)?;
    Ok(json!({
        "model": fit.model,
        "prior": fit.prior,
        "sample_size": size,
        "n_blocks": fit.n_blocks,
        "threshold": fit.chains[0].threshold,
        "established": known_json(&known),
        "propriety_override": fit.chains[0].propriety_override,
        "mcmc": cfg.mcmc,
    }))
}

pub fn fit(cfg: &RunConfig) -> Result<Outcome> {
    let fit = run_fit(cfg)?;
    let diag = diagnostics(&fit.chains)?;
    let names = &fit.chains[0].names;
    let mut summaries = serde_json::Map::new();
    let mut summary = format!("{} fit, prior {}, n = {}", fit.model, fit.prior, fit.data.len());
    for (j, name) in names.iter().enumerate() {
        let all: Vec<f64> = fit.chains.iter().flat_map(|c| c.column(j)).collect();
        let s = Summary::of(&all);
        let _ = write!(
            summary,
            "\n  {name:>5}: mean {:.4}  sd {:.4}  90% [{:.4}, {:.4}]  ess {:.0}",
            s.mean, s.sd, s.q05, s.q95, diag.ess[j]
        );
        summaries.insert(name.clone(), serde_json::to_value(s)?);
    }
    let _ = write!(summary, "\n  acceptance {:.3}", diag.acceptance_rate);
    if let Some(reason) = &fit.chains[0].propriety_override {
        let _ = write!(summary, "\n  warning: sampled with the propriety override: {reason}");
    }
    let mut body = fit_header(&fit, cfg)?;
    let obj = body.as_object_mut().unwrap();
    obj.insert(
        "chains".into(),
        json!(fit
            .chains
            .iter()
            .map(|c| json!({
                "seed": c.seed,
                "stream": c.stream,
                "draws": c.len(),
                "acceptance_rate": c.acceptance_rate,
                "burn_in_acceptance_rate": c.burn_in_acceptance_rate,
                "proposal_covariance": c.proposal_covariance,
            }))
            .collect::<Vec<_>>()),
    );
    obj.insert("summaries".into(), Value::Object(summaries));
    obj.insert("diagnostics".into(), serde_json::to_value(&diag)?);
    Ok(Outcome::new("fit", body, summary, Some(chains_table(&fit.chains))))
}

pub fn return_levels(cfg: &RunConfig) -> Result<Outcome> {
    let fit = run_fit(cfg)?;
    let mut columns = Vec::new();
    let mut levels = Vec::new();
    let mut summary = format!("{} fit, prior {}, n = {}", fit.model, fit.prior, fit.data.len());
    for &t in &cfg.periods {
        let mut draws = Vec::new();
        for c in &fit.chains {
            draws.extend(return_level(c, t)?);
        }
        let s = Summary::of(&draws);
        let _ = write!(summary, "\n  T = {t}: median {:.4}  90% [{:.4}, {:.4}]", s.median, s.q05, s.q95);
        levels.push(json!({ "period": t, "summary": s }));
        columns.push((t, draws));
    }
    let mut table = String::new();
    let header: Vec<String> = columns.iter().map(|(t, _)| format!("T{t}")).collect();
    let _ = writeln!(table, "{}", header.join("\t"));
    for i in 0..columns[0].1.len() {
        let row: Vec<String> = columns.iter().map(|(_, d)| d[i].to_string()).collect();
        let _ = writeln!(table, "{}", row.join("\t"));
    }
    let mut body = fit_header(&fit, cfg)?;
    body.as_object_mut().unwrap().insert("return_levels".into(), json!(levels));
    Ok(Outcome::new("return-level", body, summary, Some(table)))
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome> {
    let model = cfg.model.ok_or_else(|| anyhow!("--model is required"))?;
    let seed = cfg.mcmc.seed;
    let (values, params) = match model {
        FitModel::Gp => {
            let p = GpParams::new(cfg.sigma, cfg.xi)?;
            let u = cfg.threshold.unwrap_or(0.0);
            let z = gp_sample(&p, cfg.count, seed)?;
            (z.into_iter().map(|v| u + v).collect::<Vec<_>>(), json!({ "sigma": p.sigma, "xi": p.xi, "threshold": u }))
        }
        FitModel::Gev => {
            let p = GevParams::new(cfg.mu, cfg.sigma, cfg.xi)?;
            (gev_sample(&p, cfg.count, seed)?, json!({ "mu": p.mu, "sigma": p.sigma, "xi": p.xi }))
        }
        FitModel::Nhpp => bail!("simulate supports the gp and gev models"),
    };
    let summary = format!("{} {model} draws with seed {seed}", values.len());
    let body = json!({ "model": model, "params": params, "seed": seed, "count": values.len(), "values": values });
    Ok(Outcome::new("simulate", body, summary, Some(column("value", &values))))
}
