//! Longer sensing windows at a fixed sample rate.

use fd_sense::study::sensing_time_sweep;
use fd_sense::units::db_to_linear;
use fd_sense::{DetectorConfig, TargetProbabilities};

fn main() -> fd_sense::Result<()> {
    let cfg = DetectorConfig::new(1000, 1.0, db_to_linear(10.0), db_to_linear(-10.0), 0.1)?;
    let targets = TargetProbabilities::equal(0.9)?;
    let taus: Vec<f64> = (1..=10).map(|k| k as f64 * 5e-6).collect();
    for r in sensing_time_sweep(&cfg, &targets, &taus, 20e6)? {
        println!(
            "tau {:>4.0} us  N {:>4}  pf_bt {:.4}  pf_dt {:.4}",
            r.sensing_time * 1e6,
            r.num_samples,
            r.pf_before,
            r.pf_during
        );
    }
    Ok(())
}
