//! `geocatch`: simulate billiard geodesics, realize itineraries, and build or
//! defeat moving-ball catchers.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid input, 3 the control
//! condition is refuted on the sample grid, 4 evasion failed verification.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geocatch::Error;

#[derive(Parser)]
#[command(name = "geocatch", version, about = "Exact 2D billiard simulator with moving-ball catchers and evaders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace one geodesic; writes trajectory.csv, trajectory.svg, simulate.json.
    Simulate(commands::SimulateArgs),
    /// Solve and realize an itinerary in the obstacle scene.
    Itinerary(commands::ItineraryArgs),
    /// Synthesize the parking catcher; writes catch.json, path.json, path.csv.
    Catch(commands::CatchArgs),
    /// Build and certify a geodesic escaping a slow ball.
    Evade(commands::EvadeArgs),
    /// Test the control condition on a phase-space grid.
    Tgcc(commands::TgccArgs),
    /// Occupancy, dichotomy and disk-orbit analysis.
    Grc(commands::GrcArgs),
}

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn invalid(m: impl Into<String>) -> Self {
        Failure { code: 2, message: m.into() }
    }

    pub fn refuted(m: impl Into<String>) -> Self {
        Failure { code: 3, message: m.into() }
    }

    pub fn evasion(m: impl Into<String>) -> Self {
        Failure { code: 4, message: m.into() }
    }

    pub fn io(m: impl Into<String>) -> Self {
        Failure { code: 1, message: m.into() }
    }

    pub fn other(m: impl Into<String>) -> Self {
        Failure { code: 1, message: m.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidScene(_)
            | Error::InvalidArgument(_)
            | Error::UnsupportedScene(_)
            | Error::Inadmissible(_)
            | Error::OutOfRange { .. }
            | Error::HorizonTooShort { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("GEOCATCH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Failure::invalid(format!("GEOCATCH_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Failure::invalid("GEOCATCH_THREADS must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::other(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_threads()?;
    match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Itinerary(a) => commands::itinerary(a),
        Command::Catch(a) => commands::catch(a),
        Command::Evade(a) => commands::evade_cmd(a),
        Command::Tgcc(a) => commands::tgcc(a),
        Command::Grc(a) => commands::grc(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("geocatch: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
