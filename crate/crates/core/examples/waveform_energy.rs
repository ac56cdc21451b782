//! Synthesised sample blocks and their energies under each hypothesis.

use fd_sense::rng::stream;
use fd_sense::units::db_to_linear;
use fd_sense::waveform::{energy, generate, Hypothesis, Modulation, SensingWindow};
use fd_sense::DetectorConfig;

fn main() -> fd_sense::Result<()> {
    let n = SensingWindow::new(20e-6, 20e6)?.num_samples()?;
    let cfg = DetectorConfig::new(n, 1.0, db_to_linear(10.0), db_to_linear(-10.0), 0.1)?;
    let eps1 = cfg.threshold_during(0.9)?;
    println!("N = {n}, in-transmission threshold {eps1:.4}");

    for h in Hypothesis::ALL {
        let mut rng = stream(7, h.index() as u64);
        let energies: Vec<f64> = (0..2000)
            .map(|_| energy(&generate(h, &cfg, Modulation::Qpsk, &mut rng)))
            .collect::<Result<_, _>>()?;
        let mean = energies.iter().sum::<f64>() / energies.len() as f64;
        let above = energies.iter().filter(|&&e| e > eps1).count();
        println!(
            "{:<22} mean {:.4} (model {:.4})  above eps_th1 {:>4}/2000",
            h.label(),
            mean,
            h.mean_energy(&cfg),
            above
        );
    }
    Ok(())
}
