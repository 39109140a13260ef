//! Command-line front end for `evref`.
//!
//! Every command prints a JSON report on stdout and a short summary on
//! stderr; `--output` receives the columnar result (sample, curve table,
//! theorem table, chain draws or return-level draws).

pub mod commands;
pub mod config;

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use commands::{Outcome, EXIT_UNEXPECTED, FORMAT_VERSION};
pub use config::{RunConfig, Settings};

/// Exit status when sampling is refused because the posterior is not known to be proper.
pub const EXIT_REFUSED: u8 = 4;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "EVREF_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "evref", version, about = "Reference-prior Bayesian inference for extreme-value models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Read a numeric column and build an excess or block-maximum sample.
    Ingest,
    /// Tabulate prior xi-components on a grid.
    Priors,
    /// Estimate a posterior normalizing constant and classify it.
    Propriety,
    /// Run the full table of propriety claims.
    Theorems,
    /// Sample a posterior with adaptive random-walk Metropolis.
    Fit,
    /// Posterior return levels from a fit.
    ReturnLevel,
    /// Draw a GP or GEV sample.
    Simulate,
}

impl Cli {
    pub fn run_config(&self) -> Result<RunConfig> {
        let file = self.config.as_deref().map(Settings::load).transpose()?;
        RunConfig::resolve(file, &self.settings)
    }
}

/// Runs `cli` and writes the side file if `--output` was given.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = cli.run_config()?;
    let out = match cli.command {
        Command::Ingest => commands::ingest(&cfg),
        Command::Priors => commands::priors(&cfg),
        Command::Propriety => commands::propriety(&cfg),
        Command::Theorems => commands::theorems(&cfg),
        Command::Fit => commands::fit(&cfg),
        Command::ReturnLevel => commands::return_levels(&cfg),
        Command::Simulate => commands::simulate(&cfg),
    }?;
    if let (Some(path), Some(text)) = (&cfg.output, &out.side_file) {
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(out)
}

/// Exit status for an error returned by [`run`].
pub fn error_exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<evref::Error>() {
        Some(evref::Error::Improper(_)) => EXIT_REFUSED,
        _ => 1,
    }
}
