//! Dynamic in-transmission threshold across SIC factors, and the SIC factor
//! that yields a given false-alarm rate.

use fd_sense::study::sic_sweep;
use fd_sense::units::db_to_linear;
use fd_sense::{DetectorConfig, TargetProbabilities};

fn main() -> fd_sense::Result<()> {
    let cfg = DetectorConfig::new(1000, 1.0, db_to_linear(10.0), db_to_linear(-10.0), 0.0)?;
    let targets = TargetProbabilities::equal(0.9)?;
    let etas: Vec<f64> = (0..=20).map(|k| k as f64 * 0.02).collect();
    for r in sic_sweep(&cfg, &targets, &etas)? {
        println!(
            "eta {:.2}  pd {:.3}  pf {:.4}",
            r.eta, r.pd_during, r.pf_during
        );
    }

    // Largest tolerable residual SI for a 10% false-alarm rate at a fixed threshold.
    let eps1 = cfg.with_sic_factor(0.1).threshold_during(0.9)?;
    let sol = cfg.sic_factor_for_pf(eps1, 0.1)?;
    println!("pf = 0.1 at eps {eps1:.4} needs eta = {:.4}", sol.eta);

    match cfg.sic_factor_for_pf(0.3, 0.5) {
        Ok(s) => println!("unexpected solution {s:?}"),
        Err(e) => println!("infeasible request: {e}"),
    }
    Ok(())
}
