//! Closed-form energy-detector statistics for a full-duplex transmitter.
//!
//! The received energy `E = (1/N) sum |r[n]|^2` is approximated as Gaussian
//! under each of the four channel-occupancy hypotheses. With `z = eta^2 * snr_self`
//! (residual self-interference SNR) the per-hypothesis moments, normalised by
//! the noise power, are
//!
//! | hypothesis           | mean            | N * variance                 |
//! |----------------------|-----------------|------------------------------|
//! | idle                 | 1               | 1                            |
//! | other transmitting   | 1 + y2          | 2 y2 + 1                     |
//! | self only            | 1 + z           | 2 z + 1                      |
//! | self and other       | 1 + z + y2      | 2 z + 2 z y2 + 2 y2 + 1      |
//!
//! and every probability below is a Gaussian tail of one of these.

use crate::error::{Error, Result};
use crate::qfunc::{q, q_inv};
use crate::quadrature::adaptive_simpson;

/// Scalar parameters of the sensing problem. SNRs are linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Number of energy samples per decision, `N`.
    pub num_samples: usize,
    /// Noise power per complex sample.
    pub noise_power: f64,
    /// Self-interference SNR before cancellation.
    pub snr_self: f64,
    /// SNR of the colliding vehicle's signal.
    pub snr_other: f64,
    /// Residual self-interference amplitude fraction; 0 is perfect cancellation.
    pub sic_factor: f64,
}

impl DetectorConfig {
    pub fn new(
        num_samples: usize,
        noise_power: f64,
        snr_self: f64,
        snr_other: f64,
        sic_factor: f64,
    ) -> Result<Self> {
        let cfg = Self {
            num_samples,
            noise_power,
            snr_self,
            snr_other,
            sic_factor,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::config("num_samples must be at least 1"));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::config(format!(
                "noise_power must be positive, got {}",
                self.noise_power
            )));
        }
        if !(self.snr_self >= 0.0 && self.snr_self.is_finite()) {
            return Err(Error::config(format!(
                "snr_self must be nonnegative, got {}",
                self.snr_self
            )));
        }
        if !(self.snr_other >= 0.0 && self.snr_other.is_finite()) {
            return Err(Error::config(format!(
                "snr_other must be nonnegative, got {}",
                self.snr_other
            )));
        }
        if !(0.0..=1.0).contains(&self.sic_factor) {
            return Err(Error::config(format!(
                "sic_factor must lie in [0, 1], got {}",
                self.sic_factor
            )));
        }
        Ok(())
    }

    pub fn with_sic_factor(self, sic_factor: f64) -> Self {
        Self { sic_factor, ..self }
    }

    pub fn with_snr_other(self, snr_other: f64) -> Self {
        Self { snr_other, ..self }
    }

    pub fn with_num_samples(self, num_samples: usize) -> Self {
        Self {
            num_samples,
            ..self
        }
    }

    /// Residual self-interference SNR, `eta^2 * snr_self`.
    pub fn residual_si(&self) -> f64 {
        self.sic_factor * self.sic_factor * self.snr_self
    }

    fn n(&self) -> f64 {
        self.num_samples as f64
    }

    fn other_spread(&self) -> f64 {
        2.0 * self.snr_other + 1.0
    }

    fn self_spread(&self) -> f64 {
        2.0 * self.residual_si() + 1.0
    }

    // Written so that eta = 0 reproduces `other_spread` bit for bit.
    fn joint_spread(&self) -> f64 {
        let z = self.residual_si();
        2.0 * z + 2.0 * z * self.snr_other + 2.0 * self.snr_other + 1.0
    }

    /// False alarm before transmission (idle channel exceeds `eps0`).
    pub fn pf_before(&self, eps0: f64) -> f64 {
        let e = eps0 / self.noise_power;
        q((e - 1.0) * self.n().sqrt())
    }

    /// Detection before transmission (another vehicle's signal exceeds `eps0`).
    pub fn pd_before(&self, eps0: f64) -> f64 {
        let e = eps0 / self.noise_power;
        q((e - self.snr_other - 1.0) * (self.n() / self.other_spread()).sqrt())
    }

    /// False alarm during transmission: residual self-interference alone exceeds `eps1`.
    pub fn pf_during(&self, eps1: f64) -> f64 {
        let e = eps1 / self.noise_power;
        q((e - self.residual_si() - 1.0) * (self.n() / self.self_spread()).sqrt())
    }

    /// Detection during transmission: residual SI plus a colliding signal exceeds `eps1`.
    pub fn pd_during(&self, eps1: f64) -> f64 {
        let e = eps1 / self.noise_power;
        q(
            (e - self.snr_other - self.residual_si() - 1.0)
                * (self.n() / self.joint_spread()).sqrt(),
        )
    }

    /// Pre-transmission threshold meeting `target_pd` against the configured `snr_other`.
    pub fn threshold_before(&self, target_pd: f64) -> Result<f64> {
        let x = q_inv(target_pd)?;
        let eps =
            (x / (self.n() / self.other_spread()).sqrt() + self.snr_other + 1.0) * self.noise_power;
        positive_threshold(eps)
    }

    /// In-transmission threshold meeting `target_pd` with residual SI present.
    pub fn threshold_during(&self, target_pd: f64) -> Result<f64> {
        let x = q_inv(target_pd)?;
        let eps = (x / (self.n() / self.joint_spread()).sqrt()
            + self.snr_other
            + self.residual_si()
            + 1.0)
            * self.noise_power;
        positive_threshold(eps)
    }

    /// Both thresholds for the given targets.
    pub fn thresholds(&self, targets: &TargetProbabilities) -> Result<ThresholdPair> {
        Ok(ThresholdPair {
            eps_before: self.threshold_before(targets.target_pd_before)?,
            eps_during: self.threshold_during(targets.target_pd_during)?,
        })
    }

    /// Maps a pre-transmission threshold to the in-transmission threshold with
    /// the same detection probability. Only meaningful when both targets are equal.
    pub fn threshold_link(&self, eps0: f64) -> f64 {
        let e0 = eps0 / self.noise_power;
        let ratio = (self.other_spread() / self.joint_spread()).sqrt();
        ((e0 - self.snr_other - 1.0) / ratio + self.residual_si() + self.snr_other + 1.0)
            * self.noise_power
    }

    /// Inverts [`pf_during`](Self::pf_during) for the SIC factor: the `eta`
    /// at which the in-transmission false-alarm rate at `eps1` equals `target_pf`.
    ///
    /// Squaring the Q argument gives a quadratic in `z = eta^2 * snr_self`
    /// whose discriminant, scaled by `4 / N^2`, is
    /// `(8 y N x^2 + 4 x^4) / N^2` with `y = eps1/noise - 1/2` and `x = Q^-1(target_pf)`.
    /// Of the two roots only the one for which `eps1/noise - 1 - z` carries the
    /// sign of `x` solves the unsquared equation.
    pub fn sic_factor_for_pf(&self, eps1: f64, target_pf: f64) -> Result<SicFactor> {
        let x = q_inv(target_pf)?;
        if !(eps1 > 0.0) {
            return Err(Error::Domain {
                what: "eps1",
                value: eps1,
                domain: "(0, inf)",
            });
        }
        if !(self.snr_self > 0.0) {
            return Err(Error::config(
                "snr_self must be positive to solve for the SIC factor",
            ));
        }
        let n = self.n();
        let e = eps1 / self.noise_power;
        let y = e - 0.5;
        let x2 = x * x;
        let discriminant = (8.0 * y * n * x2 + 4.0 * x2 * x2) / (n * n);
        if discriminant < 0.0 {
            return Err(Error::NegativeDiscriminant { discriminant });
        }

        let u = e - 1.0;
        let mid = u + x2 / n;
        let half_width = 0.5 * discriminant.sqrt();
        // Stable pair of roots: the larger-magnitude one directly, the other
        // from the product of roots (u^2 - x^2/N).
        let big = mid + half_width.copysign(mid);
        let product = u * u - x2 / n;
        let small = if big != 0.0 { product / big } else { mid };

        let consistent = |z: f64| (u - z) * x >= 0.0 && 2.0 * z + 1.0 > 0.0;
        let candidates: Vec<f64> = [small, big]
            .into_iter()
            .filter(|&z| consistent(z))
            .collect();
        let z = candidates
            .iter()
            .copied()
            .filter(|&z| z >= 0.0)
            .reduce(f64::min)
            .or_else(|| candidates.iter().copied().reduce(f64::max))
            .ok_or(Error::SicOutOfRange {
                eta_squared: mid / self.snr_self,
                reason:
                    "only an extraneous root exists; the target is unreachable at this threshold",
            })?;

        let eta_squared = z / self.snr_self;
        if eta_squared < 0.0 {
            return Err(Error::SicOutOfRange {
                eta_squared,
                reason: "negative",
            });
        }
        if eta_squared > 1.0 {
            return Err(Error::SicOutOfRange {
                eta_squared,
                reason: "greater than one",
            });
        }
        Ok(SicFactor {
            eta_squared,
            eta: eta_squared.sqrt(),
        })
    }

    /// Mean in-transmission false-alarm rate when the SIC factor is uniform on
    /// `[eta0 - m, eta0 + m]`, by adaptive quadrature (absolute tolerance 1e-6).
    pub fn avg_pf_fluct_numeric(&self, eps1: f64, eta0: f64, m: f64) -> Result<f64> {
        self.fluctuation_mean(eta0, m, |cfg| cfg.pf_during(eps1))
    }

    /// Mean in-transmission detection rate under the same SIC fluctuation.
    pub fn avg_pd_fluct_numeric(&self, eps1: f64, eta0: f64, m: f64) -> Result<f64> {
        self.fluctuation_mean(eta0, m, |cfg| cfg.pd_during(eps1))
    }

    /// Endpoint mean of the false-alarm rate at `eta0 - m` and `eta0 + m`, each
    /// endpoint evaluated with its own SIC factor.
    pub fn avg_pf_fluct_approx(&self, eps1: f64, eta0: f64, m: f64) -> Result<f64> {
        check_fluctuation(eta0, m)?;
        let hi = self.with_sic_factor(eta0 + m).pf_during(eps1);
        let lo = self.with_sic_factor(eta0 - m).pf_during(eps1);
        Ok(0.5 * (hi + lo))
    }

    fn fluctuation_mean<F>(&self, eta0: f64, m: f64, prob: F) -> Result<f64>
    where
        F: Fn(&DetectorConfig) -> f64,
    {
        check_fluctuation(eta0, m)?;
        if m == 0.0 {
            return Ok(prob(&self.with_sic_factor(eta0)));
        }
        let width = 2.0 * m;
        let integral = adaptive_simpson(
            |eta| prob(&self.with_sic_factor(eta)),
            eta0 - m,
            eta0 + m,
            FLUCTUATION_TOLERANCE * width,
        );
        Ok(integral / width)
    }
}

/// Absolute tolerance of the fluctuation-averaged probabilities.
pub const FLUCTUATION_TOLERANCE: f64 = 1e-6;

fn check_fluctuation(eta0: f64, m: f64) -> Result<()> {
    if !(m >= 0.0) {
        return Err(Error::Domain {
            what: "fluctuation half-width",
            value: m,
            domain: "[0, inf)",
        });
    }
    if !(eta0 - m >= 0.0 && eta0 + m <= 1.0) {
        return Err(Error::Domain {
            what: "eta0",
            value: eta0,
            domain: "[m, 1 - m]",
        });
    }
    Ok(())
}

fn positive_threshold(eps: f64) -> Result<f64> {
    if eps > 0.0 {
        Ok(eps)
    } else {
        Err(Error::NonPositiveThreshold { threshold: eps })
    }
}

/// Solution of the SIC-factor inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicFactor {
    pub eta_squared: f64,
    pub eta: f64,
}

/// Energy thresholds before (`eps_th0`) and during (`eps_th1`) transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPair {
    pub eps_before: f64,
    pub eps_during: f64,
}

/// Target detection probabilities before and during transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetProbabilities {
    pub target_pd_before: f64,
    pub target_pd_during: f64,
}

impl TargetProbabilities {
    pub fn new(target_pd_before: f64, target_pd_during: f64) -> Result<Self> {
        for (name, p) in [
            ("target_pd_before", target_pd_before),
            ("target_pd_during", target_pd_during),
        ] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::config(format!(
                    "{name} must lie strictly inside (0, 1), got {p}"
                )));
            }
        }
        Ok(Self {
            target_pd_before,
            target_pd_during,
        })
    }

    pub fn equal(target: f64) -> Result<Self> {
        Self::new(target, target)
    }
}
