//! Run configuration: built-in defaults, then a TOML file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use evref::ingest::ModeName;
use evref::mcmc::McmcConfig;
use evref::propriety::{FitModel, QuadConfig};
use evref::{PriorFamily, PriorSpec};

/// Flags shared by every subcommand. Each has a key of the same name
/// (with underscores) in the config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Model: gp, gev or nhpp.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Prior family, e.g. mdi_gp_trunc or jeffreys_gev.
    #[arg(long, global = true)]
    pub prior: Option<String>,
    /// Lower truncation of xi (truncated families only).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi_lower: Option<f64>,
    /// Upper truncation of xi (truncated families only).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi_upper: Option<f64>,
    /// Threshold u; raw values above it become excesses or exceedances.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    /// Raw values per block; each block contributes its maximum.
    #[arg(long, global = true)]
    pub block_size: Option<usize>,
    /// Number of blocks the NHPP observation period spans.
    #[arg(long, global = true)]
    pub n_blocks: Option<usize>,
    /// Ingest mode: excesses, maxima, raw+threshold or raw+blocks.
    #[arg(long, global = true)]
    pub mode: Option<String>,

    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    #[arg(long, global = true)]
    pub burn_in: Option<usize>,
    #[arg(long, global = true)]
    pub thinning: Option<usize>,
    #[arg(long, global = true)]
    pub chains: Option<usize>,
    #[arg(long, global = true)]
    pub target_acceptance: Option<f64>,
    #[arg(long, global = true)]
    pub adaptation_window: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sample even when the posterior is not known to be proper.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub override_propriety: Option<bool>,

    #[arg(long, global = true)]
    pub initial_box: Option<f64>,
    #[arg(long, global = true)]
    pub doubling_limit: Option<u32>,
    #[arg(long, global = true)]
    pub cell_tol: Option<f64>,
    #[arg(long, global = true)]
    pub inner_tol: Option<f64>,
    #[arg(long, global = true)]
    pub growth_factor: Option<f64>,
    #[arg(long, global = true)]
    pub stability_tol: Option<f64>,

    /// Return periods, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(default)]
    pub period: Vec<f64>,
    /// Simulated sample size.
    #[arg(long, global = true)]
    pub count: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    /// Start of the xi grid for prior curves.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi_min: Option<f64>,
    /// End of the xi grid for prior curves.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi_max: Option<f64>,
    /// Number of grid points for prior curves.
    #[arg(long, global = true)]
    pub points: Option<usize>,

    /// Input data: one numeric column.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Path of the columnar side file (chain, curve, table or data).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl Settings {
    /// Values in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: &Settings) -> Settings {
        overlay!(self, flags; model, prior, xi_lower, xi_upper, threshold, block_size, n_blocks, mode,
            iterations, burn_in, thinning, chains, target_acceptance, adaptation_window, seed,
            override_propriety, initial_box, doubling_limit, cell_tol, inner_tol, growth_factor,
            stability_tol, count, mu, sigma, xi, xi_min, xi_max, points, input, output);
        if !flags.period.is_empty() {
            self.period = flags.period.clone();
        }
        self
    }

    pub fn from_toml(text: &str) -> Result<Settings> {
        toml::from_str(text).context("malformed config file")
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        Settings::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Option<FitModel>,
    pub prior: Option<PriorSpec>,
    pub threshold: Option<f64>,
    pub block_size: Option<usize>,
    pub n_blocks: Option<usize>,
    pub mode: Option<ModeName>,
    pub mcmc: McmcConfig,
    pub quad: QuadConfig,
    pub override_propriety: bool,
    pub periods: Vec<f64>,
    pub count: usize,
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
    pub grid: (f64, f64, usize),
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Merges `file` (lower precedence) with `flags` and validates the result.
    pub fn resolve(file: Option<Settings>, flags: &Settings) -> Result<RunConfig> {
        let s = file.unwrap_or_default().overlay(flags);
        let model = s.model.as_deref().map(str::parse::<FitModel>).transpose()?;
        let prior = match s.prior.as_deref() {
            Some(name) => Some(PriorSpec::with_bounds(name.parse::<PriorFamily>()?, s.xi_lower, s.xi_upper)?),
            None if s.xi_lower.is_some() || s.xi_upper.is_some() => bail!("xi bounds given without a prior family"),
            None => None,
        };
        let model = match (model, prior) {
            (Some(m), _) => Some(m),
            (None, Some(p)) => Some(match p.model() {
                evref::priors::Model::Gp => FitModel::Gp,
                evref::priors::Model::Gev => FitModel::Gev,
            }),
            (None, None) => None,
        };

        let d = McmcConfig::default();
        let mcmc = McmcConfig {
            iterations: s.iterations.unwrap_or(d.iterations),
            burn_in: s.burn_in.unwrap_or(d.burn_in),
            thinning: s.thinning.unwrap_or(d.thinning),
            target_acceptance: s.target_acceptance.unwrap_or(d.target_acceptance),
            adaptation_window: s.adaptation_window.unwrap_or(d.adaptation_window),
            seed: s.seed.unwrap_or(d.seed),
            chains: s.chains.unwrap_or(d.chains),
        };
        mcmc.validate()?;
        let q = QuadConfig::default();
        let quad = QuadConfig {
            initial_box: s.initial_box.unwrap_or(q.initial_box),
            doubling_limit: s.doubling_limit.unwrap_or(q.doubling_limit),
            cell_tol: s.cell_tol.unwrap_or(q.cell_tol),
            inner_tol: s.inner_tol.unwrap_or(q.inner_tol),
            growth_factor: s.growth_factor.unwrap_or(q.growth_factor),
            stability_tol: s.stability_tol.unwrap_or(q.stability_tol),
        };
        quad.validate()?;

        if let Some(u) = s.threshold {
            if !u.is_finite() {
                bail!("threshold must be finite");
            }
        }
        if s.block_size == Some(0) {
            bail!("block size must be positive");
        }
        if s.n_blocks == Some(0) {
            bail!("n_blocks must be positive");
        }
        let periods = if s.period.is_empty() { vec![10.0, 100.0] } else { s.period.clone() };
        if let Some(t) = periods.iter().find(|t| !(**t > 1.0 && t.is_finite())) {
            bail!("return periods must be finite and exceed 1, got {t}");
        }
        let grid = (s.xi_min.unwrap_or(-3.0), s.xi_max.unwrap_or(3.0), s.points.unwrap_or(121));
        if !(grid.0.is_finite() && grid.1.is_finite() && grid.0 < grid.1 && grid.2 >= 2) {
            bail!("prior grid needs finite xi_min < xi_max and at least 2 points");
        }
        let sigma = s.sigma.unwrap_or(1.0);
        if !(sigma.is_finite() && sigma > 0.0) {
            bail!("sigma must be positive and finite");
        }
        if let Some(path) = &s.input {
            if !path.is_file() {
                bail!("input file {} does not exist", path.display());
            }
        }
        if let Some(path) = &s.output {
            let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !parent.is_dir() {
                bail!("output directory {} does not exist", parent.display());
            }
        }
        Ok(RunConfig {
            model,
            prior,
            threshold: s.threshold,
            block_size: s.block_size,
            n_blocks: s.n_blocks,
            mode: s.mode.as_deref().map(str::parse::<ModeName>).transpose()?,
            mcmc,
            quad,
            override_propriety: s.override_propriety.unwrap_or(false),
            periods,
            count: s.count.unwrap_or(100),
            mu: s.mu.unwrap_or(0.0),
            sigma,
            xi: s.xi.unwrap_or(0.0),
            grid,
            input: s.input.clone(),
            output: s.output.clone(),
        })
    }
}
