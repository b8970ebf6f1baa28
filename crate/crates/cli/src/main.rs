//! `herd`: herding chains, rate learning and energy-feature classification
//! from the command line. Set `HERD_THREADS` to cap the worker pool.

mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "herd", version, about = "Deterministic herding of moment-matching pseudo-samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a herding chain; writes trajectory.csv, weights.txt and samples.txt.
    Run(commands::run::RunArgs),
    /// Objective surface and weight orbit of the sin/cos system.
    DemoTipi(commands::demo_tipi::DemoArgs),
    /// Learn rates from a data-driven chain, optionally run a data-free chain
    /// from them and export rate filters.
    Rates(commands::rates::RatesArgs),
    /// Pseudo-samples from a weight snapshot and a rate file.
    Sample(commands::sample::SampleArgs),
    /// Per-class herding energy features and baseline classifiers.
    Classify(commands::classify::ClassifyArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("HERD_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("HERD_THREADS must be a positive integer, got `{value}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    log::info!("HERD_THREADS={n} ignored in a sequential build");
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Run(a) => commands::run::execute(a),
        Command::DemoTipi(a) => commands::demo_tipi::execute(a),
        Command::Rates(a) => commands::rates::execute(a),
        Command::Sample(a) => commands::sample::execute(a),
        Command::Classify(a) => commands::classify::execute(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("herd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
