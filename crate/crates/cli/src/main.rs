//! `spectra`: eigenvalues of weighted Laplacians, bound checks and parameter sweeps.

mod commands;
mod failure;
mod options;
mod output;
mod setup;
mod sweep;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::BoundName;
use failure::Failure;
use options::Options;

#[derive(Debug, Parser)]
#[command(name = "spectra", version, about = "Spectra of weighted Laplacians and checks of eigenvalue bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the low spectrum as JSON.
    Spectrum(Options),
    /// Run one bound check and write its reports as JSON.
    Bounds {
        #[arg(value_enum)]
        name: BoundName,
        #[command(flatten)]
        options: Options,
    },
    /// Sweep j, eps or the grid size and write one CSV row per value.
    Sweep(Options),
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(o) => commands::run_spectrum(&o.resolve()?),
        Command::Bounds { name, options } => commands::run_bounds(name, &options.resolve()?),
        Command::Sweep(o) => sweep::run_sweep(&o.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
