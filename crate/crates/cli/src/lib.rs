//! `prc` — scenario-driven front end for the power-and-rate-control game.
//!
//! Every subcommand reads one scenario file (TOML with unit-suffixed
//! quantities, see [`scenario`]) and prints a report in one of three
//! output modes (see [`output`]). Exit codes are part of the contract:
//!
//!   0  success
//!   2  configuration error (bad flags, missing/invalid scenario, units)
//!   3  infeasible request (the QoS demands exceed the size budget)
//!   4  validation failure (simulation disagrees with the closed form)
//!
//! Scenario lookup: `--scenario PATH` is tried as given; if the path is
//! relative and missing, it is retried under `$PRC_SCENARIO_DIR`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

mod commands;
pub mod output;
pub mod scenario;
pub mod units;

use output::OutputMode;
use scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

/// Environment variable naming the default scenario directory.
pub const SCENARIO_DIR_ENV: &str = "PRC_SCENARIO_DIR";

/// Errors that terminate a command, tagged with their exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl From<prc_core::Error> for CliError {
    fn from(err: prc_core::Error) -> Self {
        match err {
            prc_core::Error::InfeasibleSet { .. } => CliError::Infeasible(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "prc",
    version,
    about = "Joint power-and-rate control with QoS constraints: sizes, equilibria, admission"
)]
struct Cli {
    /// Scenario file (TOML); relative paths fall back to $PRC_SCENARIO_DIR
    #[arg(long, global = true, value_name = "FILE")]
    scenario: Option<PathBuf>,

    /// Output mode
    #[arg(long, global = true, value_enum, default_value = "human")]
    output: OutputMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal SIR target gamma* and success probability f*
    GammaStar,
    /// Per-class minimum rate, target rate, size, and capacity
    Size,
    /// Pareto-dominant equilibrium powers, rates, SIRs, and utilities
    Equilibrium {
        /// Cross-check against best-response dynamics
        #[arg(long)]
        verify_brd: bool,
    },
    /// Delay-sweep tables over the scenario's grid of delay bounds
    Sweep {
        /// Which figure layout to emit (2: single rate; 3: per class)
        #[arg(long)]
        figure: u8,
    },
    /// Optimal admission; with --candidates, score allocation rows
    Admit {
        /// File of candidate allocations (comma-separated counts per line)
        #[arg(long, value_name = "FILE")]
        candidates: Option<PathBuf>,
    },
    /// Monte-Carlo delay validation against the closed form
    Validate {
        /// Packets to simulate per class (default: [validate] packets)
        #[arg(long)]
        packets: Option<u64>,
        /// Base RNG seed (default: scenario seed)
        #[arg(long)]
        seed: Option<u64>,
    },
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses arguments, runs the command, prints the report, and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders --help/--version through Err as well; its exit
            // code is 0 for those and 2 for usage errors, matching ours.
            let code = i32::from(err.use_stderr()) * EXIT_CONFIG;
            let _ = err.print();
            return code;
        }
    };

    match dispatch(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            outcome.code
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let scenario = load_scenario(cli.scenario.as_deref())?;
    match &cli.command {
        Command::GammaStar => commands::cmd_gamma_star(&scenario, cli.output),
        Command::Size => commands::cmd_size(&scenario, cli.output),
        Command::Equilibrium { verify_brd } => {
            commands::cmd_equilibrium(&scenario, *verify_brd, cli.output)
        }
        Command::Sweep { figure } => commands::cmd_sweep(&scenario, *figure, cli.output),
        Command::Admit { candidates } => {
            commands::cmd_admit(&scenario, candidates.as_deref(), cli.output)
        }
        Command::Validate { packets, seed } => {
            commands::cmd_validate(&scenario, *packets, *seed, cli.output)
        }
    }
}

fn load_scenario(path: Option<&std::path::Path>) -> Result<Scenario, CliError> {
    let Some(path) = path else {
        return Err(CliError::Config(
            "--scenario FILE is required (relative names also resolve under $PRC_SCENARIO_DIR)"
                .into(),
        ));
    };
    if path.exists() {
        return Scenario::load(path);
    }
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(SCENARIO_DIR_ENV) {
            let fallback = PathBuf::from(dir).join(path);
            if fallback.exists() {
                return Scenario::load(&fallback);
            }
        }
    }
    Err(CliError::Config(format!(
        "scenario file not found: {} (also tried ${SCENARIO_DIR_ENV})",
        path.display()
    )))
}
