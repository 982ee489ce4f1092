//! `uvt` — simulate, reconstruct, and evaluate 2D tomography from
//! projections taken at unknown angles with an unknown angle distribution.

mod commands;
mod config;
mod io_util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "uvt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    out: PathBuf,
    /// Master seed; overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a phantom, sample angles, project, and add noise.
    Simulate(CommonArgs),
    /// Estimate the angle distribution and image from a sinogram.
    Fit(CommonArgs),
    /// Reference reconstructions.
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Metric table for reconstructions against ground truth and oracle.
    Evaluate(CommonArgs),
    /// CSVs for convergence and distribution-overlay plots.
    Plotdata(CommonArgs),
}

#[derive(Subcommand)]
enum BaselineCommand {
    /// Eigenmap ordering with uniformly spaced order-statistic angles.
    Gltu(CommonArgs),
    /// Oracle FBP using the true angles stored in the sinogram.
    Orp(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(&args.config, &args.out, args.seed),
        Command::Fit(args) => commands::fit::run(&args.config, &args.out, args.seed),
        Command::Baseline(BaselineCommand::Gltu(args)) => {
            commands::baseline::run_gltu(&args.config, &args.out, args.seed)
        }
        Command::Baseline(BaselineCommand::Orp(args)) => {
            commands::baseline::run_orp(&args.config, &args.out, args.seed)
        }
        Command::Evaluate(args) => commands::evaluate::run(&args.config, &args.out, args.seed),
        Command::Plotdata(args) => commands::plotdata::run(&args.config, &args.out, args.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
