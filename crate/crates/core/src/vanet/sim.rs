//! Slotted line-network simulation. One slot is one sensing block.
//!
//! Each vehicle wants to broadcast once per CAM interval (random initial
//! phase). It senses the channel slot by slot against the pre-transmission
//! threshold and starts transmitting in the slot after an idle decision;
//! a busy decision (true detection or false alarm) defers it to the next
//! slot. Transmissions last `packet_slots` slots. A transmission that shares
//! any slot with another in-range transmission is collided and lost.
//!
//! In FD-CD mode every transmitting slot is also a sensing block against the
//! in-transmission threshold: with an in-range overlap the vehicle aborts
//! after the slot with the detection probability, otherwise it aborts with
//! the false-alarm probability. An aborted vehicle stays silent until its
//! next CAM.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;

use super::channel::mean_snr;
use super::placement::place_vehicles;
use super::{DecisionModel, DuplexMode, Fading, VanetMetrics, VanetScenario};
use crate::detector::DetectorConfig;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream, StreamRng};
use crate::waveform::{block_energy, decide, Hypothesis, Modulation, SensingWindow};

/// Per-vehicle airtime split, in slots. The four parts add up to the run length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AirtimeLedger {
    pub success: u64,
    pub collided: u64,
    pub aborted: u64,
    pub idle: u64,
}

impl AirtimeLedger {
    pub fn total(&self) -> u64 {
        self.success + self.collided + self.aborted + self.idle
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub metrics: VanetMetrics,
    pub positions: Vec<f64>,
    pub airtime: Vec<AirtimeLedger>,
    pub slot_duration: f64,
    pub total_slots: u64,
    pub packet_slots: u64,
}

pub fn simulate(scenario: &VanetScenario) -> Result<VanetMetrics> {
    Ok(simulate_traced(scenario)?.metrics)
}

#[derive(Debug, Clone, Copy)]
enum Abort {
    Detected,
    FalseAlarm,
}

#[derive(Debug, Clone, Copy)]
struct Transmission {
    start: u64,
    end: u64,
    onset: Option<u64>,
    abort: Option<Abort>,
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    Idle,
    Sensing,
    Transmitting(Transmission),
}

/// Fixed sensing parameters for one run.
struct Sensing {
    detector: DetectorConfig,
    eps_before: f64,
    eps_during: f64,
    pf_before: f64,
    pf_during: f64,
    pd_before_edge: f64,
    pd_during_edge: f64,
    pf_override: Option<f64>,
    decisions: DecisionModel,
    modulation: Modulation,
    fading: Fading,
}

impl Sensing {
    fn new(s: &VanetScenario) -> Result<Self> {
        let n = SensingWindow::new(s.sensing_time, s.sample_rate)?.num_samples()?;
        let detector = s.detector.with_num_samples(n).with_snr_other(s.edge_snr);
        detector.validate()?;
        let pair = detector.thresholds(&s.targets)?;
        Ok(Self {
            detector,
            eps_before: pair.eps_before,
            eps_during: pair.eps_during,
            pf_before: detector.pf_before(pair.eps_before),
            pf_during: s.pf_override.unwrap_or(detector.pf_during(pair.eps_during)),
            pd_before_edge: detector.pd_before(pair.eps_before),
            pd_during_edge: detector.pd_during(pair.eps_during),
            pf_override: s.pf_override,
            decisions: s.decisions,
            modulation: s.modulation,
            fading: s.fading,
        })
    }

    /// Pre-transmission decision given the aggregate in-range SNR (0 if idle).
    fn busy_before(&self, aggregate: f64, rng: &mut StreamRng) -> bool {
        match self.decisions {
            DecisionModel::Analytic => {
                let u: f64 = rng.random();
                if aggregate > 0.0 {
                    // Without fading every in-range signal is at least the edge SNR.
                    (self.fading == Fading::Off && u < self.pd_before_edge)
                        || u < self
                            .detector
                            .with_snr_other(aggregate)
                            .pd_before(self.eps_before)
                } else {
                    u < self.pf_before
                }
            }
            DecisionModel::SampleLevel => {
                let h = if aggregate > 0.0 {
                    Hypothesis::OtherTransmitting
                } else {
                    Hypothesis::Idle
                };
                let cfg = self.detector.with_snr_other(aggregate);
                decide(block_energy(h, &cfg, self.modulation, rng), self.eps_before)
            }
        }
    }

    /// In-transmission decision; `true` means the vehicle aborts.
    fn alarm_during(&self, aggregate: f64, rng: &mut StreamRng) -> bool {
        match self.decisions {
            DecisionModel::Analytic => {
                let u: f64 = rng.random();
                if aggregate > 0.0 {
                    (self.fading == Fading::Off && u < self.pd_during_edge)
                        || u < self
                            .detector
                            .with_snr_other(aggregate)
                            .pd_during(self.eps_during)
                } else {
                    u < self.pf_during
                }
            }
            DecisionModel::SampleLevel => {
                if aggregate == 0.0 {
                    if let Some(pf) = self.pf_override {
                        return rng.random::<f64>() < pf;
                    }
                }
                let h = if aggregate > 0.0 {
                    Hypothesis::SelfAndOther
                } else {
                    Hypothesis::SelfOnly
                };
                let cfg = self.detector.with_snr_other(aggregate);
                decide(block_energy(h, &cfg, self.modulation, rng), self.eps_during)
            }
        }
    }
}

struct Timing {
    slot: f64,
    packet_slots: u64,
    cam_slots: u64,
    total_slots: u64,
}

impl Timing {
    fn new(s: &VanetScenario) -> Result<Self> {
        let slot = s.sensing_time;
        let whole = |x: f64| (x / slot).round().max(1.0) as u64;
        let total_slots = (s.sim_duration / slot * (1.0 + 4.0 * f64::EPSILON)).floor() as u64;
        if total_slots == 0 {
            return Err(Error::config("sim_duration is shorter than one slot"));
        }
        Ok(Self {
            slot,
            packet_slots: whole(s.packet_duration),
            cam_slots: whole(s.cam_interval),
            total_slots,
        })
    }
}

/// Runs one scenario and returns the metrics along with per-vehicle airtime.
pub fn simulate_traced(s: &VanetScenario) -> Result<SimulationTrace> {
    s.validate()?;
    let timing = Timing::new(s)?;
    let sensing = Sensing::new(s)?;

    let mut layout_rng = stream(s.seed, 0);
    let positions = place_vehicles(s.density, s.road_length, &mut layout_rng);
    let v_count = positions.len();
    let sense_seed = derive_seed(s.seed, &[1]);
    let fd_seed = derive_seed(s.seed, &[2]);
    let mut sense_rng: Vec<StreamRng> =
        (0..v_count).map(|v| stream(sense_seed, v as u64)).collect();
    let mut fd_rng: Vec<StreamRng> = (0..v_count).map(|v| stream(fd_seed, v as u64)).collect();

    let mut cams = BinaryHeap::with_capacity(v_count);
    for v in 0..v_count {
        let phase = layout_rng.random_range(0..timing.cam_slots);
        if phase < timing.total_slots {
            cams.push(Reverse((phase, v)));
        }
    }

    let mut phase = vec![Phase::Idle; v_count];
    let mut airtime = vec![AirtimeLedger::default(); v_count];
    let mut metrics = VanetMetrics::default();
    let mut collision_slots = 0u64;

    let mut sensing_set: Vec<usize> = Vec::new();
    let mut transmitting: Vec<usize> = Vec::new();
    let mut starting: Vec<usize> = Vec::new();

    let aggregate = |listener: usize, others: &[usize], rng: &mut StreamRng| -> f64 {
        let mut total = 0.0;
        for &u in others {
            if u == listener {
                continue;
            }
            let d = (positions[u] - positions[listener]).abs();
            if d <= s.tx_range {
                let mut snr = mean_snr(d, s);
                if s.fading == Fading::RayleighBlock {
                    snr *= rng.sample::<f64, _>(rand_distr::Exp1);
                }
                total += snr;
            }
        }
        total
    };

    let mut t = 0u64;
    while t < timing.total_slots {
        if sensing_set.is_empty() && transmitting.is_empty() {
            match cams.peek() {
                Some(&Reverse((slot, _))) => t = t.max(slot),
                None => break,
            }
        }

        while let Some(&Reverse((slot, v))) = cams.peek() {
            if slot > t {
                break;
            }
            cams.pop();
            let next = slot + timing.cam_slots;
            if next < timing.total_slots {
                cams.push(Reverse((next, v)));
            }
            // A CAM that arrives while the previous one is pending or on air is dropped.
            if let Phase::Idle = phase[v] {
                phase[v] = Phase::Sensing;
                sensing_set.push(v);
            }
        }

        // Transmitters: overlap bookkeeping and in-transmission sensing for slot t.
        for &v in &transmitting {
            let others_in_range = transmitting
                .iter()
                .any(|&u| u != v && (positions[u] - positions[v]).abs() <= s.tx_range);
            let Phase::Transmitting(tx) = &mut phase[v] else {
                unreachable!("transmitting set holds only transmitting vehicles")
            };
            if others_in_range && tx.onset.is_none() {
                tx.onset = Some(t);
            }
            // A decision in the final slot has nothing left to abort.
            if s.mode == DuplexMode::FdCd && t + 1 < tx.end {
                let rng = &mut fd_rng[v];
                let agg = if others_in_range {
                    aggregate(v, &transmitting, rng)
                } else {
                    0.0
                };
                if sensing.alarm_during(agg, rng) {
                    tx.end = t + 1;
                    if others_in_range {
                        tx.abort = Some(Abort::Detected);
                        metrics.detected_collisions += 1;
                    } else {
                        tx.abort = Some(Abort::FalseAlarm);
                        metrics.false_alarms += 1;
                    }
                }
            }
        }

        // Listeners deciding whether the channel is free.
        starting.clear();
        sensing_set.retain(|&v| {
            let rng = &mut sense_rng[v];
            let agg = aggregate(v, &transmitting, rng);
            if sensing.busy_before(agg, rng) {
                return true;
            }
            if t + 1 + timing.packet_slots <= timing.total_slots {
                starting.push(v);
            } else {
                phase[v] = Phase::Idle;
            }
            false
        });

        // Close transmissions whose last slot was t.
        transmitting.retain(|&v| {
            let Phase::Transmitting(tx) = phase[v] else {
                unreachable!()
            };
            if tx.end > t + 1 {
                return true;
            }
            let slots = tx.end - tx.start;
            let ledger = &mut airtime[v];
            if let Some(onset) = tx.onset {
                metrics.collisions += 1;
                collision_slots += tx.end - onset;
                ledger.collided += slots;
            } else if tx.abort.is_some() {
                ledger.aborted += slots;
            } else {
                ledger.success += slots;
            }
            phase[v] = Phase::Idle;
            false
        });

        for &v in &starting {
            phase[v] = Phase::Transmitting(Transmission {
                start: t + 1,
                end: t + 1 + timing.packet_slots,
                onset: None,
                abort: None,
            });
            transmitting.push(v);
            metrics.attempts += 1;
        }

        t += 1;
    }

    let (mut success_slots, mut on_air) = (0u64, 0u64);
    for ledger in &mut airtime {
        let busy = ledger.success + ledger.collided + ledger.aborted;
        ledger.idle = timing.total_slots - busy;
        success_slots += ledger.success;
        on_air += busy;
    }
    metrics.total_collision_time = collision_slots as f64 * timing.slot;
    metrics.normalized_throughput = if on_air == 0 {
        0.0
    } else {
        success_slots as f64 / on_air as f64
    };

    Ok(SimulationTrace {
        metrics,
        positions,
        airtime,
        slot_duration: timing.slot,
        total_slots: timing.total_slots,
        packet_slots: timing.packet_slots,
    })
}
