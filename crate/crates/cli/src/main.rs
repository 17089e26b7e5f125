//! Command-line driver: one subcommand per experiment family, configured by
//! a flat `key = value` file plus `--set key=value` overrides.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::Config;

#[derive(Parser)]
#[command(name = "anisoagg", version, about = "Anisotropic aggregation: finite-volume solver, 1D theory and particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file; relative paths inside it resolve against its directory.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a configuration key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (same as `--set out=DIR`).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the 2D finite-volume scheme.
    Simulate(RunArgs),
    /// Stationary states of the reduced 1D problem on ℝ.
    Stationary1d(RunArgs),
    /// Tabulate δ(L).
    #[command(name = "deltaL")]
    DeltaL(RunArgs),
    /// Residuals of stripe configurations on the period.
    Stripes(RunArgs),
    /// Interacting-particle simulation.
    Particles(RunArgs),
    /// Minimizers along a decreasing sequence of δ.
    Gamma(RunArgs),
    /// Compute and cache a force table.
    Precompute(RunArgs),
}

fn load(args: &RunArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::parse("", std::env::current_dir()?)?,
    };
    for s in &args.set {
        cfg.set(s)?;
    }
    if let Some(out) = &args.out {
        cfg.set(&format!("out={}", out.display()))?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(a) => commands::simulate(&load(a)?),
        Command::Stationary1d(a) => commands::stationary1d(&load(a)?),
        Command::DeltaL(a) => commands::delta_l(&load(a)?),
        Command::Stripes(a) => commands::stripes(&load(a)?),
        Command::Particles(a) => commands::particles(&load(a)?),
        Command::Gamma(a) => commands::gamma(&load(a)?),
        Command::Precompute(a) => commands::precompute(&load(a)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
