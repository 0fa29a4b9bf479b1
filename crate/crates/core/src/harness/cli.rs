//! `pacmart` command line.
//!
//! Exit codes: 0 on success, 2 on usage or configuration errors, 1 on
//! runtime errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentConfig, ExperimentKind};
use super::{run, HarnessError};
use crate::montecarlo::with_workers;

#[derive(Debug, Parser)]
#[command(name = "pacmart", version, about = "PAC-Bayes martingale certificates and Monte-Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Anytime coverage of a bound (target set in the config).
    Coverage(RunArgs),
    /// Mean of the exponential supermartingale over many paths.
    Supermartingale(RunArgs),
    /// Certificate comparison table under bounded losses.
    Tightness(RunArgs),
    /// Bandit certificate coverage and variance lemmas.
    Bandit(RunArgs),
    /// One run of the online Gibbs learner.
    Online(RunArgs),
    /// Batch Gibbs fit with its anytime monitor.
    Batch(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Coverage(a) => (ExperimentKind::Coverage, a),
            Command::Supermartingale(a) => (ExperimentKind::Supermartingale, a),
            Command::Tightness(a) => (ExperimentKind::Tightness, a),
            Command::Bandit(a) => (ExperimentKind::Bandit, a),
            Command::Online(a) => (ExperimentKind::Online, a),
            Command::Batch(a) => (ExperimentKind::Batch, a),
        }
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = cli.command.split();
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("pacmart: {e}");
            return 2;
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(output) = args.output {
        config.output = output;
    }
    match with_workers(args.workers, || run(kind, &config)) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(HarnessError::Config(e)) => {
            eprintln!("pacmart: {e}");
            2
        }
        Err(HarnessError::Runtime(e)) => {
            eprintln!("pacmart: {e}");
            1
        }
    }
}
