//! `curvehom`: turn curve homotopies into isotopies of simple curves, halve
//! contractions of doubled curves, and cross-check the engine against
//! brute-force oracles.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curve_homotopy::smoothing::DEFAULT_CAP;

mod commands;
mod failure;
mod input;
mod oracle;

use failure::Failure;

#[derive(Parser)]
#[command(name = "curvehom", version, about = "Curve homotopies to isotopies of simple curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args, Clone, Debug)]
pub struct Options {
    /// Output file (directory for `demo`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for step_NNNN.svg files.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Length budget added by redrawing crossings.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Fixed smoothing disk radius; shrunk automatically when too large.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for the oracle commands.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Largest crossing count for which resolutions are enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and elaborate a move script or keyframe file; print crossing counts.
    Validate { input: PathBuf },
    /// Build the resolution graph and find an isotopy of simple curves.
    Isotope { input: PathBuf },
    /// Halve a contraction of the doubled curve of ALPHA.
    Halve { alpha: PathBuf, script: PathBuf },
    /// Detect Reidemeister events in polyline keyframes.
    Ingest { keyframes: PathBuf },
    #[command(subcommand)]
    Demo(Demo),
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum Demo {
    /// Isotopy from a round circle to a simple polygon.
    Schoenflies {
        polygon: PathBuf,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Admissible resolutions per level, engine against brute force.
    Resolutions {
        input: PathBuf,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Reachability of the last level in the resolution graph.
    Paths { input: PathBuf },
    /// Local smoothing tables of every triangle move.
    R3 {
        input: PathBuf,
        #[arg(long)]
        level: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = cli.opts;
    if !(opts.epsilon > 0.0) {
        return Err(Failure::input("--epsilon must be positive"));
    }
    if opts.jobs == 0 {
        return Err(Failure::input("--jobs must be at least 1"));
    }
    match cli.command {
        Command::Validate { input } => commands::validate(&input),
        Command::Isotope { input } => commands::isotope(&input, &opts),
        Command::Halve { alpha, script } => commands::halve(&alpha, &script, &opts),
        Command::Ingest { keyframes } => commands::ingest(&keyframes, &opts),
        Command::Demo(Demo::Schoenflies { polygon, samples }) => commands::schoenflies(&polygon, samples, &opts),
        Command::Oracle(OracleCommand::Resolutions { input, level }) => oracle::resolutions(&input, level, &opts),
        Command::Oracle(OracleCommand::Paths { input }) => oracle::paths(&input, &opts),
        Command::Oracle(OracleCommand::R3 { input, level }) => oracle::r3(&input, level, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    std::panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(failure::INVARIANT),
    }
}
