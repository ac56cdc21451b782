//! Full-duplex energy-detection collision sensing for vehicular broadcast
//! networks.
//!
//! * [`detector`] holds the closed-form detection and false-alarm
//!   probabilities, the dual dynamic thresholds and their inversions.
//! * [`waveform`] synthesises complex baseband sample blocks under the four
//!   channel-occupancy hypotheses and computes the energy statistic.
//! * [`montecarlo`] estimates empirical rates and checks them against the
//!   closed forms.
//! * [`vanet`] simulates a Poisson line network of half-duplex or
//!   collision-detecting full-duplex vehicles.
//! * [`study`] turns configurations into plot-ready CSV tables; it backs
//!   the `fd-sense` binary.

pub mod detector;
pub mod error;
pub mod montecarlo;
pub mod qfunc;
pub mod quadrature;
pub mod rng;
pub mod study;
pub mod units;
pub mod vanet;
pub mod waveform;

pub use detector::{DetectorConfig, SicFactor, TargetProbabilities, ThresholdPair};
pub use error::{Error, Result};
pub use qfunc::{q, q_approx, q_inv};
