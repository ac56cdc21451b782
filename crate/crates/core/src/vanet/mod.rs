//! Poisson line-network broadcast simulation: half-duplex vehicles versus
//! full-duplex vehicles that detect collisions while transmitting and abort.

mod channel;
mod placement;
mod sim;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::detector::{DetectorConfig, TargetProbabilities};
use crate::error::{Error, Result};
use crate::rng::DEFAULT_SEED;
use crate::units::db_to_linear;
use crate::waveform::Modulation;

pub use channel::{snr_at, MAX_SNR_ABOVE_EDGE_DB};
pub use placement::place_vehicles;
pub use sim::{simulate, simulate_traced, AirtimeLedger, SimulationTrace};
pub use sweep::{sweep_density, DensitySummary, MetricStats, ReplicateRow, SweepTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DuplexMode {
    /// Deaf while transmitting; a collision lasts for the rest of the packet.
    #[serde(rename = "HD")]
    Hd,
    /// Senses during transmission and aborts on a detected collision.
    #[serde(rename = "FD-CD")]
    FdCd,
}

impl DuplexMode {
    pub fn label(self) -> &'static str {
        match self {
            DuplexMode::Hd => "HD",
            DuplexMode::FdCd => "FD-CD",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fading {
    #[default]
    Off,
    /// Unit-mean exponential power factor, redrawn for every sensing block.
    RayleighBlock,
}

/// How a sensing decision is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionModel {
    /// Bernoulli draw with the closed-form probability for the current SNR.
    #[default]
    Analytic,
    /// Synthesise the sample block and threshold its energy.
    SampleLevel,
}

/// Input of one line-network run. Lengths in km, times in seconds, SNRs linear.
#[derive(Debug, Clone, PartialEq)]
pub struct VanetScenario {
    /// Vehicles per km.
    pub density: f64,
    pub road_length: f64,
    /// Transmission range; the sensing range is the same.
    pub tx_range: f64,
    pub packet_duration: f64,
    pub cam_interval: f64,
    /// Length of one sensing block, which is also the simulation slot.
    pub sensing_time: f64,
    pub sample_rate: f64,
    pub sim_duration: f64,
    pub mode: DuplexMode,
    /// `num_samples` and `snr_other` are replaced by the sensing window and
    /// the edge SNR when thresholds are derived.
    pub detector: DetectorConfig,
    pub targets: TargetProbabilities,
    /// Received SNR of a vehicle exactly at `tx_range`.
    pub edge_snr: f64,
    pub path_loss_exponent: f64,
    /// Pins the in-transmission false-alarm probability.
    pub pf_override: Option<f64>,
    pub fading: Fading,
    pub decisions: DecisionModel,
    pub modulation: Modulation,
    pub seed: u64,
}

impl Default for VanetScenario {
    fn default() -> Self {
        Self {
            density: 100.0,
            road_length: 2.0,
            tx_range: 0.3,
            packet_duration: 0.5e-3,
            cam_interval: 0.1,
            sensing_time: 20e-6,
            sample_rate: 20e6,
            sim_duration: 10.0,
            mode: DuplexMode::Hd,
            detector: DetectorConfig {
                num_samples: 400,
                noise_power: 1.0,
                snr_self: db_to_linear(10.0),
                snr_other: db_to_linear(-10.0),
                sic_factor: 0.1,
            },
            targets: TargetProbabilities {
                target_pd_before: 0.9,
                target_pd_during: 0.9,
            },
            edge_snr: db_to_linear(-10.0),
            path_loss_exponent: 3.0,
            pf_override: None,
            fading: Fading::Off,
            decisions: DecisionModel::Analytic,
            modulation: Modulation::Qpsk,
            seed: DEFAULT_SEED,
        }
    }
}

impl VanetScenario {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("road_length", self.road_length),
            ("tx_range", self.tx_range),
            ("packet_duration", self.packet_duration),
            ("cam_interval", self.cam_interval),
            ("sensing_time", self.sensing_time),
            ("sample_rate", self.sample_rate),
            ("sim_duration", self.sim_duration),
            ("edge_snr", self.edge_snr),
            ("path_loss_exponent", self.path_loss_exponent),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(Error::config(format!(
                "density must be nonnegative, got {}",
                self.density
            )));
        }
        if self.sensing_time >= self.packet_duration {
            return Err(Error::config(
                "sensing_time must be shorter than packet_duration",
            ));
        }
        if let Some(pf) = self.pf_override {
            if !(0.0..=1.0).contains(&pf) {
                return Err(Error::config(format!(
                    "pf_override must lie in [0, 1], got {pf}"
                )));
            }
        }
        self.detector.validate()
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VanetMetrics {
    /// Seconds of overlap summed over all colliding transmissions, from the
    /// first overlapping slot to the end (HD) or abort (FD-CD).
    pub total_collision_time: f64,
    /// Mean over vehicles of the fraction of time spent sending CAMs that
    /// were fully transmitted with no in-range overlap.
    pub normalized_throughput: f64,
    /// Transmissions started.
    pub attempts: u64,
    /// Transmissions overlapped by at least one in-range transmission.
    pub collisions: u64,
    /// Collisions aborted on in-transmission detection.
    pub detected_collisions: u64,
    /// Transmissions aborted by an in-transmission false alarm.
    pub false_alarms: u64,
}
