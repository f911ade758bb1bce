//! Batch front door: simulate datasets, train and evaluate models, inspect
//! participants, and build model comparison tables.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "fcncd",
    about = "Forced-choice cognitive diagnosis: simulate, train, evaluate",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with known ground truth.
    Simulate(commands::simulate::Args),
    /// Train a model on a dataset and write a checkpoint.
    Train(commands::train::Args),
    /// Evaluate a checkpoint against a dataset (PRA, LRA, DOA).
    Eval(commands::eval::Args),
    /// Report per-participant abilities and block-level predictions.
    Diagnose(commands::diagnose::Args),
    /// Train and evaluate several models, producing a leaderboard CSV.
    Bench(commands::bench::Args),
}

fn main() -> ExitCode {
    fcncd_core::numerics::tune_allocator();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Train(args) => commands::train::run(&args),
        Command::Eval(args) => commands::eval::run(&args),
        Command::Diagnose(args) => commands::diagnose::run(&args),
        Command::Bench(args) => commands::bench::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            // user/input problems exit 2, internal failures exit 1
            let user_error = err
                .downcast_ref::<fcncd_core::Error>()
                .map(fcncd_core::Error::is_user_error)
                .unwrap_or(false);
            ExitCode::from(if user_error { 2 } else { 1 })
        }
    }
}
