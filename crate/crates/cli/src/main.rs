//! `bfm`: learn binary fuzzy measures from multiple-instance data and fuse
//! multi-source confidences with the Choquet integral.

mod bench;
mod error;
mod fuse;
mod output;
mod synth;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;
use output::Outputs;

#[derive(Debug, Parser)]
#[command(name = "bfm", version, about)]
struct Cli {
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Evaluate sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic dataset from a spec.
    Synth(synth::SynthArgs),
    /// Learn a measure from a dataset.
    Train(train::TrainArgs),
    /// Fuse a dataset with a measure or a fixed aggregation and score it.
    FuseEval(fuse::FuseArgs),
    /// Time binary versus real-valued training over several source counts.
    Bench(bench::BenchArgs),
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Validation("--threads must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot size thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    eprintln!("warning: built without parallel support; --threads ignored");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    let outputs = Outputs::new(cli.force);
    let parallel = !cli.sequential && bfm_core::parallel_available();
    match &cli.command {
        Command::Synth(a) => synth::run(a, &outputs),
        Command::Train(a) => train::run(a, &outputs, parallel),
        Command::FuseEval(a) => fuse::run(a, &outputs),
        Command::Bench(a) => bench::run(a, &outputs, parallel),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
