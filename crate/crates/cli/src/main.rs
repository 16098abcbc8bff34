//! `mirrorbench`: generate, simulate, analyze and report mirror-circuit
//! benchmark experiments stored in a directory.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};

use commands::{config_error, Failure, Outcome, Overrides};

#[derive(Parser, Debug)]
#[command(name = "mirrorbench", version, about = "Scalable process-fidelity benchmarks from mirror circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Shots per proxy circuit (overrides the config).
    #[arg(long, value_name = "N")]
    shots: Option<u64>,
    /// Master seed (overrides the config).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the benchmark suite and write circuits.jsonl and manifest.json.
    Generate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sample shots for every proxy circuit into shots.jsonl.
    Simulate {
        /// Noise model JSON (defaults to the config's model).
        #[arg(long, value_name = "PATH", conflicts_with = "fake_uniform")]
        noise: Option<PathBuf>,
        /// Uniformly random bitstrings instead of simulation.
        #[arg(long)]
        fake_uniform: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate fidelities into results.csv.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Render report.svg and summary.txt from results.csv.
    Report {
        #[command(flatten)]
        common: Common,
    },
    /// Exact fidelities of small benchmarks into oracle.csv.
    Oracle {
        #[arg(long, value_name = "PATH")]
        noise: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn dir(common: &Common) -> Outcome<PathBuf> {
    common
        .out
        .clone()
        .ok_or_else(|| config_error(anyhow!("--out DIR is required")))
}

fn run(cli: Cli) -> Outcome {
    let common = match &cli.command {
        Command::Generate { common, .. }
        | Command::Simulate { common, .. }
        | Command::Analyze { common }
        | Command::Report { common }
        | Command::Oracle { common, .. } => common.clone(),
    };
    if let Some(j) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| config_error(anyhow!("--jobs: {e}")))?;
    }
    let ov = Overrides {
        shots: common.shots,
        seed: common.seed,
    };
    match &cli.command {
        Command::Generate { config, .. } => commands::generate(config, common.out.as_deref(), &ov),
        Command::Simulate { noise, fake_uniform, .. } => {
            commands::simulate(&dir(&common)?, noise.as_deref(), *fake_uniform, &ov)
        }
        Command::Analyze { .. } => commands::analyze_dir(&dir(&common)?, &ov),
        Command::Report { .. } => commands::report(&dir(&common)?, &ov),
        Command::Oracle { noise, .. } => commands::oracle(&dir(&common)?, noise.as_deref(), &ov),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
