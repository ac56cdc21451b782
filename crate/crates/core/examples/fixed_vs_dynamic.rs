//! A threshold calibrated once at the weakest SNR versus one recomputed per SNR.

use fd_sense::study::compare_fixed_vs_dynamic;
use fd_sense::units::db_to_linear;
use fd_sense::{DetectorConfig, TargetProbabilities};

fn main() -> fd_sense::Result<()> {
    let cfg = DetectorConfig::new(1000, 1.0, db_to_linear(10.0), db_to_linear(-10.0), 0.1)?;
    let targets = TargetProbabilities::equal(0.9)?;
    let snrs: Vec<f64> = (0..=10).map(|k| -20.0 + 2.0 * k as f64).collect();

    println!("snr_db  pd_dyn  pf_dyn  pd_fix  pf_fix");
    for (db, r) in snrs
        .iter()
        .zip(compare_fixed_vs_dynamic(&cfg, &targets, &snrs)?)
    {
        println!(
            "{db:>6.0}  {:.3}   {:.3}   {:.3}   {:.3}",
            r.pd_dynamic, r.pf_dynamic, r.pd_fixed, r.pf_fixed
        );
    }
    Ok(())
}
