//! `phasemac` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use phasemac::config::{CliOverrides, ExperimentConfig};
use phasemac::experiments::{anomaly, energy, mnist, oracle, report};

#[derive(Parser, Debug)]
#[command(
    name = "phasemac",
    version,
    about = "Behavioral simulator of a phase-domain GRO MAC: correctness oracle, \
             energy model, anomaly-detection and digit-classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Plain-text key=value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Root seed; every derived stream is deterministic under it.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Inference resolutions, e.g. 8,6,4,2 (also accepts 'float').
    #[arg(long, global = true, value_delimiter = ',', value_name = "BITS")]
    bits: Option<Vec<String>>,

    /// Batch sizes for the energy sweep, e.g. 1,2,4,8,16,32,64,128.
    #[arg(long, global = true, value_delimiter = ',', value_name = "SIZE")]
    batch: Option<Vec<u32>>,

    /// Output directory (default: ./out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Full-scale configuration (whole dataset, deep model); hours, not minutes.
    #[arg(long, global = true)]
    full: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Randomized exact-equivalence check of the MAC pipeline (10^6 trials).
    Oracle,
    /// Batch-size energy sweep and efficiency report CSVs.
    Energy,
    /// Anomaly-detection resolution sweep on synthetic vibration data.
    Anomaly,
    /// Digit-classification accuracy, float vs quantized PMAC.
    Mnist,
    /// Performance-comparison table with published figures.
    Report,
}

fn run(cli: &Cli) -> Result<bool> {
    let overrides = CliOverrides {
        config: cli.config.clone(),
        seed: cli.seed,
        bits: cli.bits.clone(),
        batch: cli.batch.clone(),
        out: cli.out.clone(),
        full: cli.full,
    };
    let cfg = ExperimentConfig::build(&overrides)?;
    match cli.command {
        Command::Oracle => {
            let outcome = oracle::run_oracle(&cfg)?;
            Ok(outcome.passed())
        }
        Command::Energy => {
            energy::run_energy(&cfg)?;
            Ok(true)
        }
        Command::Anomaly => {
            anomaly::run_anomaly(&cfg)?;
            Ok(true)
        }
        Command::Mnist => {
            mnist::run_mnist(&cfg)?;
            Ok(true)
        }
        Command::Report => {
            report::run_report(&cfg)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
