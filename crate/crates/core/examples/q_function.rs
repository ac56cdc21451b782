//! Gaussian tail function, its inverse, and the exponential approximation.

use fd_sense::{q, q_approx, q_inv};

fn main() -> fd_sense::Result<()> {
    println!(
        "{:>6} {:>14} {:>14} {:>10}",
        "x", "q(x)", "q_approx(x)", "q_inv(q)"
    );
    for x in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0] {
        let p = q(x);
        println!(
            "{x:>6.2} {p:>14.6e} {:>14.6e} {:>10.6}",
            q_approx(x)?,
            q_inv(p)?
        );
    }
    println!("q_inv(0.9) = {}", q_inv(0.9)?);
    Ok(())
}
