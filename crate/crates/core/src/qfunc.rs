//! Standard normal upper-tail function and its inverse.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Gaussian upper-tail probability `Q(x) = P(Z > x)`.
pub fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`q`]: the `x` with `Q(x) = p`.
///
/// A rational first guess (Acklam) is polished with Halley steps on the
/// erfc-based tail, which keeps `|q(q_inv(p)) - p|` at rounding level.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            what: "probability",
            value: p,
            domain: "(0, 1)",
        });
    }
    // Work with the lower quantile y = Phi^-1(p); Q^-1(p) = -y.
    let mut y = acklam_lower_quantile(p);
    for _ in 0..3 {
        let err = q(-y) - p;
        if err == 0.0 {
            break;
        }
        let u = err * (2.0 * PI).sqrt() * (0.5 * y * y).exp();
        let step = u / (1.0 + 0.5 * y * u);
        if !step.is_finite() {
            break;
        }
        y -= step;
    }
    Ok(-y)
}

/// Loose tail bound `Q(x) ~ exp(-x^2/2) / 2`, valid for `x >= 0`.
///
/// Only used to reproduce the closed-form manipulation of the averaged
/// false-alarm integrand; the detector itself always uses [`q`].
pub fn q_approx(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "[0, inf)",
        });
    }
    Ok(0.5 * (-0.5 * x * x).exp())
}

fn acklam_lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}
