//! `fracws`: potential curves, spectra, wavefunctions, α-scans and the
//! verification report for the generalized Woods-Saxon well.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "fracws", version, about = "Fractional Nikiforov-Uvarov solver for the generalized Woods-Saxon well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Args {
    /// Flat JSON config; flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Sample V(r) on [0, r_max]
    Potential(Args),
    /// Solve the energy condition for n = 0..=n_max
    Spectrum(Args),
    /// Normalized radial function of level n
    Wavefunction(Args),
    /// Level n across a grid of α at fixed β_frac
    ScanAlpha(Args),
    /// Run the gated checks and write verify-report.json
    Verify(Args),
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    Usage(String),
    /// Runtime failure; exit code 1.
    Io(std::io::Error),
}

impl CliError {
    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn io(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn resolve(args: &Args) -> Result<RunConfig, CliError> {
    let base = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    Ok(base.overlay(&args.run))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Potential(a) => commands::potential(&resolve(a)?).map(|_| true),
        Command::Spectrum(a) => commands::spectrum(&resolve(a)?).map(|_| true),
        Command::Wavefunction(a) => commands::wavefunction(&resolve(a)?).map(|_| true),
        Command::ScanAlpha(a) => commands::scan_alpha(&resolve(a)?).map(|_| true),
        Command::Verify(a) => commands::verify(&resolve(a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fracws: gated verification failed");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("fracws: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("fracws: {e}");
            ExitCode::from(1)
        }
    }
}
