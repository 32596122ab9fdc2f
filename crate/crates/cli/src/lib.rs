//! Command-line front end: configuration, orchestration and output files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::Outcome;
use config::{Mode, Overrides, RunConfig};
use error::{CliError, CliResult};
use output::Bundle;

#[derive(Debug, Parser)]
#[command(
    name = "boltzmann",
    version,
    about = "Kepler motion with a reflecting wall"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// JSON configuration file; built-in reference settings when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Number of collisions.
    #[arg(long)]
    pub n: Option<usize>,
    /// Centrifugal coefficient.
    #[arg(long)]
    pub g: Option<f64>,
    /// Ensemble seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trajectory with collisions (modes exact-g0, perturbed).
    Simulate(CommonArgs),
    /// Increment of the conjugate angle along an orbit.
    Gamma(CommonArgs),
    /// Poincaré sections of a seeded ensemble.
    Section(CommonArgs),
    /// Boundary of the accessible region on the wall.
    Region(CommonArgs),
    /// Invariant suite on the reference configurations.
    Verify(CommonArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs, &'static [Mode]) {
        match self {
            Command::Simulate(a) => ("simulate", a, &[Mode::ExactG0, Mode::Perturbed]),
            Command::Gamma(a) => ("gamma", a, &[Mode::Gamma]),
            Command::Section(a) => ("section", a, &[Mode::Section]),
            Command::Region(a) => ("region", a, &[Mode::Region]),
            Command::Verify(a) => ("verify", a, &[Mode::Verify]),
        }
    }
}

/// Loads the configuration, applies overrides and checks the mode fits the
/// subcommand.
pub fn resolve_config(command: &Command) -> CliResult<RunConfig> {
    let (name, args, modes) = command.parts();
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::builtin(args.mode.unwrap_or(modes[0])),
    };
    Overrides {
        mode: args.mode,
        n: args.n,
        g: args.g,
        seed: args.seed,
        out: args.out.clone(),
    }
    .apply(&mut cfg)?;
    if !modes.contains(&cfg.mode) {
        return Err(CliError::Config(format!(
            "mode: {} cannot be run by `{name}`",
            cfg.mode.name()
        )));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one command and writes its bundle; the manifest is written last.
pub fn execute(command: &Command) -> CliResult<Outcome> {
    let cfg = resolve_config(command)?;
    let (name, _, _) = command.parts();
    let mut bundle = Bundle::create(&cfg.output_dir)?;
    let (outcome, summary) = match command {
        Command::Simulate(_) => commands::simulate::run(&cfg, &mut bundle)?,
        Command::Gamma(_) => commands::gamma::run(&cfg, &mut bundle)?,
        Command::Section(_) => commands::section::run(&cfg, &mut bundle)?,
        Command::Region(_) => commands::region::run(&cfg, &mut bundle)?,
        Command::Verify(_) => commands::verify::run(&cfg, &mut bundle)?,
    };
    let config = json!({
        "run": cfg,
        "effective_tolerances": cfg.tolerances.effective(),
    });
    bundle.finish(name, config, summary)?;
    Ok(outcome)
}

/// Exit status for a finished command.
pub fn exit_code(result: &CliResult<Outcome>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(e) => e.exit_code(),
    }
}
