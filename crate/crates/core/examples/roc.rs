//! In-transmission ROC: detection versus false alarm as the threshold moves.

use fd_sense::study::roc_curves;
use fd_sense::units::db_to_linear;
use fd_sense::DetectorConfig;

fn main() -> fd_sense::Result<()> {
    let cfg = DetectorConfig::new(1000, 1.0, db_to_linear(10.0), db_to_linear(-10.0), 0.1)?;
    let thresholds: Vec<f64> = (0..=12)
        .map(|k| db_to_linear(0.2 + 0.1 * k as f64))
        .collect();
    let rows = roc_curves(&cfg, &[0.0, 0.1, 0.2], &thresholds)?;

    let mut last_eta = f64::NAN;
    for r in rows {
        if r.eta != last_eta {
            println!("eta = {}", r.eta);
            last_eta = r.eta;
        }
        println!(
            "  eps {:.4}  pd {:.4}  pf {:.4}",
            r.threshold, r.pd_during, r.pf_during
        );
    }
    Ok(())
}
