use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ves_core::verify::Fault;

mod commands;
mod config;
mod error;
mod output;

use commands::Globals;
use config::Model;

/// Round-trip efficiency studies of HVAC virtual energy storage.
#[derive(Debug, Parser)]
#[command(name = "ves", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML). Omitted sections use the reference plant.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the randomized verification draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Integration step in seconds; overrides `[integrator] dt`.
    #[arg(long, global = true, value_name = "SECONDS")]
    dt: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the baseline equilibrium and report the linearization.
    Baseline,
    /// Run one square-wave schedule with recovery.
    Rte,
    /// Efficiency curve over the configured grid.
    Sweep,
    /// Check the analytic claims over randomized parameter draws.
    Verify {
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Run one schedule on the closed-loop extended model.
    Extended,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = Globals {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        dt: cli.dt,
    };
    let outcome = match cli.command {
        Command::Baseline => commands::baseline(&g),
        Command::Rte => commands::rte(&g, None),
        Command::Sweep => commands::sweep(&g),
        Command::Verify { inject_fault } => commands::verify(&g, inject_fault),
        Command::Extended => commands::rte(&g, Some(Model::Extended)),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ves: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
