//! The `stripe` command line: one TOML config per run, flags only for
//! overrides.
//!
//! Exit codes: 0 when every computation finished and every requested
//! certification or bound passed, 1 when a certification or bound failed
//! (or a solver did not converge), 2 on usage, configuration or I/O errors.

pub mod config;
mod commands;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::Outcome;

#[derive(Debug, Parser)]
#[command(name = "stripe", version, about = "Stackelberg risk preference design")]
pub struct Cli {
    /// Output directory for result records, tables and run.log.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the scenario (or instance) seed of the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the ε of the config.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the follower's problem for a fixed type distribution.
    SolveFollower { config: PathBuf },
    /// Solve the leader's problem and verify the equilibrium on grids.
    SolveStripe { config: PathBuf },
    /// Check the approximation bounds on randomized instance families.
    VerifyBounds { config: PathBuf },
    /// Run an application scenario.
    Scenario { name: ScenarioName, config: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScenarioName {
    Contract,
    Meta,
}

/// Flags shared by every command.
#[derive(Debug, Clone)]
pub struct Overrides {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SolveFollower { .. } => "solve-follower",
            Command::SolveStripe { .. } => "solve-stripe",
            Command::VerifyBounds { .. } => "verify-bounds",
            Command::Scenario {
                name: ScenarioName::Contract,
                ..
            } => "scenario contract",
            Command::Scenario {
                name: ScenarioName::Meta, ..
            } => "scenario meta",
        }
    }
}

/// Runs a parsed command and maps the outcome to an exit code.
pub fn run(cli: Cli) -> ExitCode {
    let o = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        epsilon: cli.epsilon,
    };
    let name = cli.command.name();
    let start = Instant::now();
    let result = match &cli.command {
        Command::SolveFollower { config } => commands::solve_follower_cmd(config, &o),
        Command::SolveStripe { config } => commands::solve_stripe_cmd(config, &o),
        Command::VerifyBounds { config } => commands::verify_bounds_cmd(config, &o),
        Command::Scenario { name, config } => match name {
            ScenarioName::Contract => commands::contract_cmd(config, &o),
            ScenarioName::Meta => commands::meta_cmd(config, &o),
        },
    };
    match result {
        Ok((outcome, out)) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            let status = if outcome.passed { "passed" } else { "failed" };
            println!("{name}: {status}; results in {}", o.out.display());
            if let Err(e) = out.log(name, start.elapsed(), status) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn main() -> ExitCode {
    run(Cli::parse())
}
