//! Complex baseband sample synthesis under the four occupancy hypotheses and
//! the energy test statistic.
//!
//! Signals are unit-envelope PSK streams with random symbols and a random
//! carrier phase per block, scaled to the configured SNRs; noise is circular
//! complex Gaussian. Residual self-interference is the self signal scaled in
//! amplitude by the SIC factor, so its power is `eta^2 * snr_self * noise`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::detector::DetectorConfig;
use crate::error::{Error, Result};

/// Channel-occupancy hypothesis seen by a full-duplex receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    /// H0: nobody transmits.
    Idle,
    /// H1: another vehicle transmits; we listen.
    OtherTransmitting,
    /// H2: we transmit alone; only residual self-interference is present.
    SelfOnly,
    /// H3: we and another vehicle transmit concurrently.
    SelfAndOther,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 4] = [
        Hypothesis::Idle,
        Hypothesis::OtherTransmitting,
        Hypothesis::SelfOnly,
        Hypothesis::SelfAndOther,
    ];

    pub fn index(self) -> usize {
        match self {
            Hypothesis::Idle => 0,
            Hypothesis::OtherTransmitting => 1,
            Hypothesis::SelfOnly => 2,
            Hypothesis::SelfAndOther => 3,
        }
    }

    pub fn label(self) -> &'static str {
        ["H0", "H1", "H2", "H3"][self.index()]
    }

    pub fn has_self(self) -> bool {
        matches!(self, Hypothesis::SelfOnly | Hypothesis::SelfAndOther)
    }

    pub fn has_other(self) -> bool {
        matches!(
            self,
            Hypothesis::OtherTransmitting | Hypothesis::SelfAndOther
        )
    }

    /// Mean of the energy statistic predicted by the Gaussian model.
    pub fn mean_energy(self, cfg: &DetectorConfig) -> f64 {
        let mut snr = 1.0;
        if self.has_other() {
            snr += cfg.snr_other;
        }
        if self.has_self() {
            snr += cfg.residual_si();
        }
        snr * cfg.noise_power
    }

    /// Variance of the energy statistic predicted by the Gaussian model.
    pub fn energy_variance(self, cfg: &DetectorConfig) -> f64 {
        let z = if self.has_self() {
            cfg.residual_si()
        } else {
            0.0
        };
        let y = if self.has_other() { cfg.snr_other } else { 0.0 };
        let s2 = cfg.noise_power * cfg.noise_power;
        (2.0 * z + 2.0 * z * y + 2.0 * y + 1.0) * s2 / cfg.num_samples as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    #[default]
    Qpsk,
}

impl Modulation {
    fn symbol(self, bits: u32) -> Complex64 {
        match self {
            Modulation::Bpsk => {
                if bits & 1 == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
            Modulation::Qpsk => {
                let re = if bits & 1 == 0 {
                    FRAC_1_SQRT_2
                } else {
                    -FRAC_1_SQRT_2
                };
                let im = if bits & 2 == 0 {
                    FRAC_1_SQRT_2
                } else {
                    -FRAC_1_SQRT_2
                };
                Complex64::new(re, im)
            }
        }
    }
}

/// Sensing duration and sampling frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingWindow {
    pub sensing_time: f64,
    pub sample_rate: f64,
}

impl SensingWindow {
    pub fn new(sensing_time: f64, sample_rate: f64) -> Result<Self> {
        if !(sensing_time > 0.0 && sample_rate > 0.0) {
            return Err(Error::config(format!(
                "sensing window needs positive time and rate, got tau={sensing_time}, fs={sample_rate}"
            )));
        }
        Ok(Self {
            sensing_time,
            sample_rate,
        })
    }

    /// Largest integer not exceeding `tau * fs`.
    pub fn num_samples(&self) -> Result<usize> {
        // Products like 1e-3 * 1e6 land a few ulps below the integer.
        let product = self.sensing_time * self.sample_rate;
        let n = (product * (1.0 + 4.0 * f64::EPSILON)).floor();
        if n < 1.0 {
            return Err(Error::config(format!(
                "sensing window too short: tau*fs = {product} < 1"
            )));
        }
        Ok(n as usize)
    }
}

/// `N` received samples under one hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    pub samples: Vec<Complex64>,
    pub hypothesis: Hypothesis,
    pub config: DetectorConfig,
}

/// Per-block signal parameters; per-sample draws come from [`Components::next`].
struct Components {
    noise_std: f64,
    other: Complex64,
    self_residual: Complex64,
    modulation: Modulation,
}

impl Components {
    fn draw<R: Rng + ?Sized>(cfg: &DetectorConfig, modulation: Modulation, rng: &mut R) -> Self {
        let other_phase: f64 = rng.random::<f64>() * TAU;
        let self_phase: f64 = rng.random::<f64>() * TAU;
        let other_amp = (cfg.snr_other * cfg.noise_power).sqrt();
        let self_amp = cfg.sic_factor * (cfg.snr_self * cfg.noise_power).sqrt();
        Self {
            noise_std: (0.5 * cfg.noise_power).sqrt(),
            other: Complex64::from_polar(other_amp, other_phase),
            self_residual: Complex64::from_polar(self_amp, self_phase),
            modulation,
        }
    }

    /// One sample's (noise, other signal, residual self signal).
    #[inline]
    fn next<R: Rng + ?Sized>(&self, rng: &mut R) -> (Complex64, Complex64, Complex64) {
        let bits: u32 = rng.random();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let noise = Complex64::new(re, im) * self.noise_std;
        let other = self.other * self.modulation.symbol(bits);
        let residual = self.self_residual * self.modulation.symbol(bits >> 2);
        (noise, other, residual)
    }
}

#[inline]
fn combine(h: Hypothesis, noise: Complex64, other: Complex64, residual: Complex64) -> Complex64 {
    match h {
        Hypothesis::Idle => noise,
        Hypothesis::OtherTransmitting => other + noise,
        Hypothesis::SelfOnly => residual + noise,
        Hypothesis::SelfAndOther => residual + other + noise,
    }
}

/// Synthesises one block of `cfg.num_samples` received samples.
pub fn generate<R: Rng + ?Sized>(
    hypothesis: Hypothesis,
    cfg: &DetectorConfig,
    modulation: Modulation,
    rng: &mut R,
) -> SampleBlock {
    let parts = Components::draw(cfg, modulation, rng);
    let samples = (0..cfg.num_samples)
        .map(|_| {
            let (w, s, si) = parts.next(rng);
            combine(hypothesis, w, s, si)
        })
        .collect();
    SampleBlock {
        samples,
        hypothesis,
        config: *cfg,
    }
}

/// Energy of a block that would be produced by [`generate`] with the same
/// stream, without materialising the samples.
pub fn block_energy<R: Rng + ?Sized>(
    hypothesis: Hypothesis,
    cfg: &DetectorConfig,
    modulation: Modulation,
    rng: &mut R,
) -> f64 {
    let parts = Components::draw(cfg, modulation, rng);
    let mut acc = 0.0;
    for _ in 0..cfg.num_samples {
        let (w, s, si) = parts.next(rng);
        acc += combine(hypothesis, w, s, si).norm_sqr();
    }
    acc / cfg.num_samples as f64
}

/// Energies under all four hypotheses from one shared realisation of noise,
/// symbols and phases, indexed by [`Hypothesis::index`]. Each entry has the
/// same law as [`block_energy`] for that hypothesis.
pub fn joint_energies<R: Rng + ?Sized>(
    cfg: &DetectorConfig,
    modulation: Modulation,
    rng: &mut R,
) -> [f64; 4] {
    let parts = Components::draw(cfg, modulation, rng);
    let mut acc = [0.0; 4];
    for _ in 0..cfg.num_samples {
        let (w, s, si) = parts.next(rng);
        acc[0] += w.norm_sqr();
        acc[1] += (s + w).norm_sqr();
        acc[2] += (si + w).norm_sqr();
        acc[3] += (si + s + w).norm_sqr();
    }
    acc.map(|a| a / cfg.num_samples as f64)
}

/// Average sample energy `(1/N) sum |r[n]|^2`.
pub fn energy(block: &SampleBlock) -> Result<f64> {
    energy_of(&block.samples)
}

pub fn energy_of(samples: &[Complex64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::config("energy of an empty sample block"));
    }
    Ok(samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64)
}

/// Declares the event present when the energy strictly exceeds the threshold.
pub fn decide(energy: f64, threshold: f64) -> bool {
    energy > threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn cfg(n: usize, y1: f64, y2: f64, eta: f64) -> DetectorConfig {
        DetectorConfig::new(n, 1.0, y1, y2, eta).unwrap()
    }

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn window_sample_counts() {
        assert_eq!(
            SensingWindow::new(1e-3, 1e6)
                .unwrap()
                .num_samples()
                .unwrap(),
            1000
        );
        assert_eq!(
            SensingWindow::new(1.5e-6, 1e6)
                .unwrap()
                .num_samples()
                .unwrap(),
            1
        );
        assert_eq!(
            SensingWindow::new(20e-6, 20e6)
                .unwrap()
                .num_samples()
                .unwrap(),
            400
        );
        assert!(SensingWindow::new(0.5e-6, 1e6)
            .unwrap()
            .num_samples()
            .is_err());
        assert!(SensingWindow::new(0.0, 1e6).is_err());
    }

    #[test]
    fn decide_is_strict() {
        assert!(!decide(1.0, 1.0));
        assert!(decide(1.0 + 1e-12, 1.0));
        assert!(!decide(0.0, 1.0));
    }

    #[test]
    fn energy_of_constant_blocks() {
        assert_eq!(energy_of(&[Complex64::new(0.0, 0.0); 8]).unwrap(), 0.0);
        let c = Complex64::from_polar(1.5, 0.3);
        let e = energy_of(&[c; 16]).unwrap();
        assert!((e - 2.25).abs() < 1e-12);
        assert!(energy_of(&[]).is_err());
    }

    #[test]
    fn generate_matches_streaming_energy_and_is_deterministic() {
        let c = cfg(257, 10.0, 0.3, 0.2);
        for h in Hypothesis::ALL {
            for m in [Modulation::Bpsk, Modulation::Qpsk] {
                let a = generate(h, &c, m, &mut stream(11, 5));
                let b = generate(h, &c, m, &mut stream(11, 5));
                assert_eq!(a, b);
                assert_eq!(a.samples.len(), 257);
                let streamed = block_energy(h, &c, m, &mut stream(11, 5));
                assert!((energy(&a).unwrap() - streamed).abs() < 1e-12);
                let joint = joint_energies(&c, m, &mut stream(11, 5));
                assert!((joint[h.index()] - streamed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn idle_noise_power() {
        let c = cfg(1_000_000, 10.0, 0.1, 0.1);
        let e = energy(&generate(
            Hypothesis::Idle,
            &c,
            Modulation::Qpsk,
            &mut stream(1, 0),
        ))
        .unwrap();
        assert!((e - 1.0).abs() < 0.004, "{e}");
    }

    #[test]
    fn joint_hypothesis_power() {
        // sigma_s^2 + eta^2 sigma_i^2 + sigma_w^2 = 0.1 + 0.1 + 1
        let c = cfg(1_000_000, 10.0, 0.1, 0.1);
        let block = generate(
            Hypothesis::SelfAndOther,
            &c,
            Modulation::Qpsk,
            &mut stream(2, 0),
        );
        let e = energy(&block).unwrap();
        assert!((e - 1.2).abs() < 0.005, "{e}");
        assert!((Hypothesis::SelfAndOther.mean_energy(&c) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn perfect_cancellation_leaves_noise_only() {
        let c = cfg(64, 10.0, 0.5, 0.0);
        let h0 = generate(Hypothesis::Idle, &c, Modulation::Qpsk, &mut stream(3, 9));
        let h2 = generate(
            Hypothesis::SelfOnly,
            &c,
            Modulation::Qpsk,
            &mut stream(3, 9),
        );
        assert_eq!(h0.samples, h2.samples);
    }

    #[test]
    fn idle_energy_moments() {
        let c = cfg(1000, 10.0, 0.1, 0.1);
        let es: Vec<f64> = (0..10_000)
            .map(|i| block_energy(Hypothesis::Idle, &c, Modulation::Qpsk, &mut stream(4, i)))
            .collect();
        let (mean, var) = moments(&es);
        let se = (1e-3f64 / 1e4).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "{mean}");
        assert!((var / 1e-3 - 1.0).abs() < 0.1, "{var}");
    }

    #[test]
    fn hypothesis_moments_match_gaussian_model() {
        let c = cfg(1000, 10.0, 0.5, 0.3);
        for h in Hypothesis::ALL {
            let es: Vec<f64> = (0..10_000)
                .map(|i| block_energy(h, &c, Modulation::Qpsk, &mut stream(5, i)))
                .collect();
            let (mean, var) = moments(&es);
            let model_var = h.energy_variance(&c);
            let se = (model_var / es.len() as f64).sqrt();
            assert!(
                (mean - h.mean_energy(&c)).abs() < 3.0 * se,
                "{h:?} mean {mean}"
            );
            assert!(
                (var / model_var - 1.0).abs() < 0.1,
                "{h:?} var {var} vs {model_var}"
            );
        }
    }
}
