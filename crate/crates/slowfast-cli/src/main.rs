//! `slowfast` — bifurcation analytics and simulation for the slow-fast
//! predator-prey model, driven by TOML run configurations.
//!
//! Every subcommand reads `--config`, resolves all defaults, writes the
//! fully explicit configuration to `<out>/manifest.toml`, and then
//! produces its artifacts next to it. Re-running any manifest reproduces
//! the artifacts byte for byte.
//!
//! Exit codes: 0 success, 2 unusable request, 3 failed computation.

mod commands;
mod config;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::failure::{CmdResult, Failure};

#[derive(Parser)]
#[command(name = "slowfast", version, about = "Slow-fast predator-prey toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form report: equilibria, thresholds, regime, wave speeds.
    Analyze(RunArgs),
    /// Cycle detection across mortality values, optionally locating the
    /// canard-explosion window.
    Sweep(RunArgs),
    /// Time integration: kinetics trajectories, limit-cycle orbits, or
    /// 1D/2D reaction-diffusion fields.
    Simulate(RunArgs),
    /// Entry-exit quantities of the singular relaxation orbit.
    #[command(name = "entry-exit")]
    EntryExit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.cmd {
        Cmd::Analyze(a) => ("analyze", a),
        Cmd::Sweep(a) => ("sweep", a),
        Cmd::Simulate(a) => ("simulate", a),
        Cmd::EntryExit(a) => ("entry-exit", a),
    };
    match run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}

fn run(name: &str, args: &RunArgs) -> CmdResult<()> {
    let mut cfg = config::load(&args.config)?;
    let p = cfg.finalize(name)?;

    std::fs::create_dir_all(&args.out).map_err(|e| {
        Failure::config(format!(
            "cannot create output directory {}: {e}",
            args.out.display()
        ))
    })?;
    let manifest = toml::to_string_pretty(&cfg)
        .map_err(|e| Failure::config(format!("cannot serialize manifest: {e}")))?;
    output::write_atomic(&args.out.join("manifest.toml"), manifest.as_bytes())?;

    match name {
        "analyze" => commands::analyze::run(&cfg, &p, &args.out),
        "sweep" => commands::sweep::run(&cfg, &p, &args.out),
        "simulate" => commands::simulate::run(&cfg, &p, &args.out),
        "entry-exit" => commands::entry_exit::run(&cfg, &p, &args.out),
        _ => unreachable!("clap only admits the four subcommands"),
    }
}
