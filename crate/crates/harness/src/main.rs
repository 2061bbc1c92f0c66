use std::path::PathBuf;
use std::process::ExitCode;

use boostnys::sampling::rng_from_seed;
use boostnys_harness::data::{generate_gaussian_points, write_csv};
use boostnys_harness::error::HarnessError;
use boostnys_harness::plot::emit_plot;
use boostnys_harness::{run_experiment, ExperimentSpec, Result};
use clap::{Parser, Subcommand};

/// Standard, ensemble and boosting Nyström experiments.
#[derive(Parser)]
#[command(name = "boostnys", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write standard-normal points as CSV.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment file and write traces, summaries, tests and plots.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Render the error plot of a summary CSV.
    Plot {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { n, d, seed, out } => {
            let data = generate_gaussian_points(n, d, &mut rng_from_seed(seed))?;
            write_csv(&data, &out)
        }
        Command::Run { config, out_dir } => {
            let spec = ExperimentSpec::from_file(&config)?;
            let result = run_experiment(&spec, &out_dir)?;
            println!(
                "{} trace rows, {} summary rows written to {}",
                result.trace.len(),
                result.summary.len(),
                out_dir.display()
            );
            Ok(())
        }
        Command::Plot { summary, out } => {
            let text = std::fs::read_to_string(&summary).map_err(|e| HarnessError::Io { path: summary, source: e })?;
            std::fs::write(&out, emit_plot(&text)?).map_err(|e| HarnessError::Io { path: out, source: e })
        }
    }
}
