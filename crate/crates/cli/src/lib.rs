//! Experiment runner for `glitch_core`: configuration, subcommands and CSV
//! output.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "glitchlab", version, about = "Arbiter glitch experiments")]
pub struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed (overrides `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Extra `key=value` override, applied after the file. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Distance regressions and seeded metric-axiom checks.
    Metrics,
    /// Convergence of the example sequences to zero.
    Convergence,
    /// Decision time against input skew.
    Sweep,
    /// Bisect for an input that decides no earlier than TARGET.
    Search {
        #[arg(allow_negative_numbers = true)]
        target: f64,
    },
    /// Component counts for the pulse nets and the image chain.
    Connectivity,
}

/// Effective configuration: defaults, then the file, then `--set`, then
/// the dedicated flags.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        config.apply_text(&text)?;
    }
    for item in &cli.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("--set expects KEY=VALUE, got {item:?}")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

/// Runs one subcommand and writes its CSV files plus `config.txt`.
/// Returns the summary lines.
pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let config = load_config(cli)?;
    let outcome = match cli.command {
        Command::Metrics => experiments::metrics(&config)?,
        Command::Convergence => experiments::convergence(&config)?,
        Command::Sweep => experiments::sweep(&config)?,
        Command::Search { target } => experiments::search(&config, target)?,
        Command::Connectivity => experiments::connectivity(&config)?,
    };
    let written = output::write_tables(&config.out, &outcome.tables, &[("config.txt", config.to_text())])?;
    let mut lines = outcome.summary;
    lines.extend(written.iter().map(|p| format!("wrote {}", p.display())));
    Ok(lines)
}
