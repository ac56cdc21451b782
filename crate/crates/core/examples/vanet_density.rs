//! Half-duplex versus full-duplex collision detection on a Poisson road.

use fd_sense::vanet::{sweep_density, DuplexMode, VanetScenario};

fn main() -> fd_sense::Result<()> {
    let base = VanetScenario {
        pf_override: Some(0.01),
        ..VanetScenario::default()
    };
    let densities = [0.0, 50.0, 100.0, 150.0, 200.0];
    let table = sweep_density(&base, &densities, &[DuplexMode::Hd, DuplexMode::FdCd], 5)?;

    println!("veh/km  mode   collision s  throughput");
    for s in table.summary() {
        println!(
            "{:>6}  {:<5}  {:>7.4} ±{:.4}  {:.4}",
            s.density,
            s.mode.label(),
            s.collision_time.mean,
            s.collision_time.std,
            s.throughput.mean
        );
    }
    Ok(())
}
