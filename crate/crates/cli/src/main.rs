use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod report;
mod runner;

use config::{CliArgs, RunConfig};

/// Numerical checks for static vacuum metrics with negative cosmological
/// constant: curvature identities, boundary expansions, and mass integrals.
#[derive(Parser)]
#[command(name = "statvac", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate curvature and divergence identities on a catalog metric.
    Verify(CliArgs),
    /// Extract the boundary expansion and check the mass identity.
    Mass(CliArgs),
    /// List the available metrics and their parameters.
    Catalog,
}

fn run(args: CliArgs, mass: bool) -> ExitCode {
    let cfg = match RunConfig::resolve(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("statvac: {msg}");
            return ExitCode::from(2);
        }
    };
    let outcome = if mass {
        runner::cmd_mass(&cfg)
    } else {
        runner::cmd_verify(&cfg)
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("statvac: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => run(args, false),
        Command::Mass(args) => run(args, true),
        Command::Catalog => {
            runner::cmd_catalog();
            ExitCode::SUCCESS
        }
    }
}
