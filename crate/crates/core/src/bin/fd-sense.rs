use std::io::ErrorKind;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fd_sense::study::{self, RunConfig};
use fd_sense::Error;

/// Full-duplex spectrum sensing studies. Writes CSV.
#[derive(Debug, Parser)]
#[command(name = "fd-sense", version)]
struct Cli {
    /// thresholds, roc, validate, sensitivity, sic-sweep,
    /// sensing-time-sweep, fluctuation or vanet
    command: String,

    /// JSON configuration document
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Monte Carlo trials per point, or replicates per cell for `vanet`
    #[arg(long)]
    trials: Option<u64>,

    /// Dotted overrides such as detector.snr_other=-5dB
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::from_args(
        &cli.command,
        cli.config.as_deref(),
        &cli.overrides,
        cli.out,
        cli.seed,
        cli.trials,
    )
    .and_then(|run| study::run(&run));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // Downstream closed stdout early, e.g. piped into `head`.
        Err(Error::Io(e)) if e.kind() == ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fd-sense: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
