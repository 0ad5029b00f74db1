//! `qan`: runs the notification and network experiments and writes CSV.

mod commands;
mod format;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use qan_core::attacks::{AdversaryModel, ParityGoal};
use qan_core::protocol::NoiseAccounting;
use qan_core::qsim::Backend;

#[derive(Parser, Debug)]
#[command(name = "qan", version, about = "GHZ anonymous-notification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed; every trial derives its own stream from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per grid point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "exact")]
    backend: Backend,
    /// Number of users.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Single-qubit depolarizing probability.
    #[arg(long)]
    p1: Option<f64>,
    /// Two-qubit depolarizing probability.
    #[arg(long)]
    p2: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detection probability over a (pz, K) grid.
    Detect {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.45")]
        pz: Vec<f64>,
        #[arg(long, default_value_t = 9)]
        kmax: usize,
        #[arg(long, default_value_t = PI)]
        delta: f64,
    },
    /// Outcome distribution for each possible flipper slot.
    Anonymity {
        #[command(flatten)]
        common: Common,
    },
    /// False positives of the modified and baseline variants.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 9)]
        kmax: usize,
        /// all-gates | exempt-identity
        #[arg(long, default_value = "all-gates")]
        accounting: NoiseAccounting,
    },
    /// Adversary experiments.
    Attack {
        #[command(flatten)]
        common: Common,
        /// poison | last-speaker | semi-honest
        #[arg(long)]
        model: AdversaryModel,
        /// Poisoning probabilities, one row each.
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,1")]
        prob: Vec<f64>,
        /// force | suppress
        #[arg(long, default_value = "force")]
        goal: ParityGoal,
        /// Corrupted user indices.
        #[arg(long, value_delimiter = ',')]
        corrupted: Option<Vec<usize>>,
        /// Poisoning angle range `lo,hi`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        angle: Option<Vec<f64>>,
        /// Rounds per session.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Kick probability in active sessions.
        #[arg(long, default_value_t = 1.0)]
        pz: f64,
    },
    /// Network scenario from a TOML file.
    Quanet {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quick internal consistency checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn require_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        Cli::command()
            .error(ErrorKind::MissingRequiredArgument, "--seed is required for this command")
            .exit()
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
