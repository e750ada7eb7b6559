//! `rlsf`: run engagement experiments from a config file.
//!
//! Exit codes: 0 success, 2 config error, 3 data error, 4 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;
use rlsf_core::experiment::{run_command, Command, ExperimentConfig, EXIT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "rlsf", version, about = "Engagement simulation and simulated-feedback fine-tuning")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Experiment config (`key = value` lines).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides `seed` for every component.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = "RLSF_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Generate a synthetic network and write edges, opinions, communities.
    Generate(Common),
    /// Pick the injection node.
    Place(Common),
    /// Engagement over the sentiment grid and its upper bound.
    Sweep(Common),
    /// Fine-tune the sentiment policy against the simulator.
    Train(Common),
    /// Simulated vs observed engagement for scored texts.
    Compare(Common),
    /// Robust line fit of two CSV columns.
    Ransac(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Generate(a) => (Command::Generate, a),
        Cmd::Place(a) => (Command::Place, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Train(a) => (Command::Train, a),
        Cmd::Compare(a) => (Command::Compare, a),
        Cmd::Ransac(a) => (Command::Ransac, a),
    };
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            error!("{}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    let out = args
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    match run_command(command, &config, &out) {
        Ok(()) => {
            log::info!("{} finished; artifacts in {}", command.as_str(), out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
