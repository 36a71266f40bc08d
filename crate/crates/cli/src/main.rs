//! `cachestp`: analyze, optimize and simulate random caching designs, and
//! regenerate the figure data sets.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use cachestp::figures::{FigureId, FigureOptions, Scale};
use clap::{Args, Parser, Subcommand};

use crate::config::{EngineName, ExperimentConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "cachestp",
    version,
    about = "Random caching in backhaul-limited multi-antenna networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// STP and ASE of a caching design over a parameter sweep.
    Analyze(Common),
    /// Optimize the caching design at every sweep point.
    Optimize(Common),
    /// Monte Carlo STP with a cross-check against an analytic engine.
    Simulate(Common),
    /// Regenerate a figure data set along with a gnuplot script.
    ReproduceFigure(FigureArgs),
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo.
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineName>,
    /// Monte Carlo realizations.
    #[arg(long)]
    realizations: Option<u64>,
}

#[derive(Args)]
struct FigureArgs {
    /// One of 2a, 2b, 3, 4, 5a, 5b, 6a, 6b.
    figure: FigureId,
    #[arg(long, default_value = "desk")]
    scale: Scale,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output CSV path; the script is written next to it with a `.gp` extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the Monte Carlo columns.
    #[arg(long)]
    analytic_only: bool,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.sim.rng_seed = seed;
        }
        if let Some(threads) = self.threads {
            cfg.sim.threads = threads;
        }
        if let Some(n) = self.realizations {
            cfg.sim.realizations = n;
        }
        if let Some(engine) = self.engine {
            cfg.engine = engine;
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let cfg = args.load()?;
            let path = cfg.output_path("analyze.csv");
            commands::analyze(&cfg)?.write(&path)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Optimize(args) => {
            let cfg = args.load()?;
            let path = cfg.output_path("optimize.csv");
            let (csv, records) = commands::optimize(&cfg)?;
            csv.write(&path)?;
            let json = path.with_extension("json");
            commands::write_records(&json, &records)?;
            eprintln!("wrote {} and {}", path.display(), json.display());
        }
        Command::Simulate(args) => {
            let cfg = args.load()?;
            let path = cfg.output_path("simulate.csv");
            commands::simulate_cmd(&cfg)?.write(&path)?;
            eprintln!("wrote {}", path.display());
        }
        Command::ReproduceFigure(args) => {
            if args.threads == 0 {
                return Err(CliError::Config("threads must be at least 1".into()));
            }
            let opts = FigureOptions {
                scale: args.scale,
                seed: args.seed,
                threads: args.threads,
                simulate: !args.analytic_only,
            };
            let (csv, script) = commands::reproduce_figure(args.figure, &opts, args.out)?;
            eprintln!("wrote {} and {}", csv.display(), script.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
