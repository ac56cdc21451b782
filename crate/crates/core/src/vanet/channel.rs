use rand::Rng;
use rand_distr::Exp1;

use super::{Fading, VanetScenario};
use crate::units::db_to_linear;

/// Ceiling on received SNR relative to the edge SNR, in dB.
pub const MAX_SNR_ABOVE_EDGE_DB: f64 = 40.0;

/// Received SNR at `distance` km under log-distance path loss anchored at
/// `edge_snr` for `distance == tx_range`, or `None` outside the range.
pub fn snr_at<R: Rng + ?Sized>(
    distance: f64,
    scenario: &VanetScenario,
    rng: &mut R,
) -> Option<f64> {
    if distance > scenario.tx_range {
        return None;
    }
    let mean = mean_snr(distance, scenario);
    Some(match scenario.fading {
        Fading::Off => mean,
        Fading::RayleighBlock => {
            let factor: f64 = rng.sample(Exp1);
            mean * factor
        }
    })
}

pub(super) fn mean_snr(distance: f64, scenario: &VanetScenario) -> f64 {
    let cap = scenario.edge_snr * db_to_linear(MAX_SNR_ABOVE_EDGE_DB);
    if distance <= 0.0 {
        return cap;
    }
    let snr = scenario.edge_snr * (scenario.tx_range / distance).powf(scenario.path_loss_exponent);
    snr.min(cap)
}
