//! Monte Carlo check of the closed forms on a small grid.
//!
//! Run with `--release`; each point synthesises `trials` blocks of N samples.

use fd_sense::montecarlo::{validate_grid, GridPoint};
use fd_sense::rng::DEFAULT_SEED;
use fd_sense::units::db_to_linear;
use fd_sense::{DetectorConfig, TargetProbabilities};

fn main() -> fd_sense::Result<()> {
    let targets = TargetProbabilities::equal(0.9)?;
    let mut grid = Vec::new();
    for snr_db in [-20.0, -10.0, 0.0] {
        for eta in [0.0, 0.1, 0.3] {
            let config =
                DetectorConfig::new(400, 1.0, db_to_linear(10.0), db_to_linear(snr_db), eta)?;
            grid.push(GridPoint { config, targets });
        }
    }
    let report = validate_grid(&grid, 20_000, DEFAULT_SEED)?;
    report.write_csv(std::io::stdout().lock())?;
    eprintln!(
        "{} of {} estimates agree",
        report.records.len() - report.failures().count(),
        report.records.len()
    );
    Ok(())
}
