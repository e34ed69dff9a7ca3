mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Options, Output};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "csl-rotor", version, about = "CSL localization, diffusion and planar-rotor computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Form factor along rays in k-space
    Formfactor(RunArgs),
    /// Orientational localization rate against the axis angle
    Locrate(RunArgs),
    /// Diffusion coefficients and heating rates over a sweep of r_C
    Diffusion(RunArgs),
    /// Planar rotor Wigner-function snapshots and variance series
    Planar(RunArgs),
    /// Exclusion curves from heating rates and their crossing
    Exclude(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Compare against the built-in oracle and fail if the deviation exceeds --tol
    #[arg(long)]
    check: bool,
    /// Relative tolerance for --check
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, f): (&RunArgs, fn(&config::Loaded, &Options) -> Result<Output, CliError>) = match &cli.command {
        Command::Formfactor(a) => (a, commands::formfactor),
        Command::Locrate(a) => (a, commands::locrate),
        Command::Diffusion(a) => (a, commands::diffusion),
        Command::Planar(a) => (a, commands::planar),
        Command::Exclude(a) => (a, commands::exclude),
    };
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::config("--tol", "must be finite and positive"));
    }
    let cfg = config::load(&args.config)?;
    let opts = Options {
        check: args.check,
        tol: args.tol,
    };
    let out = f(&cfg, &opts)?;
    output::write_files(&args.out, &out.files)?;
    for line in &out.summary {
        println!("{line}");
    }
    for (name, _) in &out.files {
        println!("wrote {}", args.out.join(name).display());
    }
    if let Some(c) = out.check {
        println!("check: {} : max deviation {:.3e} (tolerance {:.3e})", c.what, c.deviation, args.tol);
        if !(c.deviation <= args.tol) {
            return Err(CliError::CheckFailed {
                deviation: c.deviation,
                tol: args.tol,
            });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
