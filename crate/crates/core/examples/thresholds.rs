//! Energy thresholds before and during transmission as the SIC factor grows.

use fd_sense::study::threshold_table;
use fd_sense::units::{db_to_linear, linear_to_db};
use fd_sense::{DetectorConfig, TargetProbabilities};

fn main() -> fd_sense::Result<()> {
    let cfg = DetectorConfig::new(1000, 1.0, db_to_linear(10.0), db_to_linear(-10.0), 0.0)?;
    let targets = TargetProbabilities::equal(0.9)?;
    let etas: Vec<f64> = (0..=8).map(|k| k as f64 * 0.05).collect();

    println!(
        "{:>5} {:>12} {:>12} {:>10}",
        "eta", "eps_th0 dB", "eps_th1 dB", "gap"
    );
    for r in threshold_table(&cfg, &targets, &etas)? {
        println!(
            "{:>5.2} {:>12.4} {:>12.4} {:>10.5}",
            r.eta,
            linear_to_db(r.eps_before),
            linear_to_db(r.eps_during),
            r.eps_during - r.eps_before
        );
    }
    Ok(())
}
