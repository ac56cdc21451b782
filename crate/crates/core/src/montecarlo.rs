//! Monte Carlo estimation of detection and false-alarm rates, and
//! validation of the closed forms against them.

use std::io::Write;

use rayon::prelude::*;

use crate::detector::{DetectorConfig, TargetProbabilities};
use crate::error::{Error, Result};
use crate::qfunc::{normal_pdf, q_inv};
use crate::rng::{derive_seed, stream};
use crate::units::linear_to_db;
use crate::waveform::{block_energy, decide, joint_energies, Hypothesis, Modulation};

pub const MIN_TRIALS: u64 = 100;
/// Default trial count per estimated probability.
pub const DEFAULT_TRIALS: u64 = 100_000;
/// Fixed part of the validation tolerance, covering second-order CLT error.
pub const BASE_TOLERANCE: f64 = 0.005;

/// Exceedance count with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalRate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EmpiricalRate {
    /// Wilson interval at two-sided `confidence` (e.g. 0.95).
    pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(Error::config(format!(
                "invalid Bernoulli count {successes}/{trials}"
            )));
        }
        let z = q_inv(0.5 * (1.0 - confidence))?;
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Ok(Self {
            successes,
            trials,
            rate: p,
            ci_low: (center - half).max(0.0).min(p),
            ci_high: (center + half).min(1.0).max(p),
        })
    }

    /// Binomial standard error evaluated at probability `p`.
    pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
        (p * (1.0 - p) / trials as f64).sqrt()
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::config(format!(
            "at least {MIN_TRIALS} trials are required, got {trials}"
        )));
    }
    Ok(())
}

/// Fraction of `trials` synthesised blocks under `hypothesis` whose energy
/// exceeds `threshold`, with a 95% Wilson interval. Trial `i` draws from
/// stream `i` of `seed`.
pub fn estimate_rate(
    hypothesis: Hypothesis,
    cfg: &DetectorConfig,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalRate> {
    estimate_rate_with(
        hypothesis,
        cfg,
        Modulation::default(),
        threshold,
        trials,
        seed,
    )
}

pub fn estimate_rate_with(
    hypothesis: Hypothesis,
    cfg: &DetectorConfig,
    modulation: Modulation,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalRate> {
    cfg.validate()?;
    check_trials(trials)?;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let e = block_energy(hypothesis, cfg, modulation, &mut stream(seed, i));
            decide(e, threshold)
        })
        .count() as u64;
    EmpiricalRate::wilson(hits, trials, 0.95)
}

/// The four probabilities of the dual-threshold detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    PfBefore,
    PdBefore,
    PfDuring,
    PdDuring,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::PfBefore,
        Metric::PdBefore,
        Metric::PfDuring,
        Metric::PdDuring,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::PfBefore => "pf_bt",
            Metric::PdBefore => "pd_bt",
            Metric::PfDuring => "pf_dt",
            Metric::PdDuring => "pd_dt",
        }
    }

    pub fn hypothesis(self) -> Hypothesis {
        match self {
            Metric::PfBefore => Hypothesis::Idle,
            Metric::PdBefore => Hypothesis::OtherTransmitting,
            Metric::PfDuring => Hypothesis::SelfOnly,
            Metric::PdDuring => Hypothesis::SelfAndOther,
        }
    }

    pub fn is_during(self) -> bool {
        matches!(self, Metric::PfDuring | Metric::PdDuring)
    }

    pub fn analytic(self, cfg: &DetectorConfig, threshold: f64) -> f64 {
        match self {
            Metric::PfBefore => cfg.pf_before(threshold),
            Metric::PdBefore => cfg.pd_before(threshold),
            Metric::PfDuring => cfg.pf_during(threshold),
            Metric::PdDuring => cfg.pd_during(threshold),
        }
    }
}

/// First-order Edgeworth correction to the Gaussian tail at `threshold`: the
/// size of the error the closed forms make by ignoring the skew of the
/// finite-N energy statistic. Per-sample skew is taken from the noncentral
/// chi-square law with the hypothesis' total signal SNR.
pub fn clt_allowance(hypothesis: Hypothesis, cfg: &DetectorConfig, threshold: f64) -> f64 {
    let mut snr = 0.0;
    if hypothesis.has_other() {
        snr += cfg.snr_other;
    }
    if hypothesis.has_self() {
        snr += cfg.residual_si();
    }
    let n = cfg.num_samples as f64;
    let skew = (2.0 + 6.0 * snr) / ((1.0 + 2.0 * snr).powf(1.5) * n.sqrt());
    let sd = hypothesis.energy_variance(cfg).sqrt();
    let x = (threshold - hypothesis.mean_energy(cfg)) / sd;
    (skew / 6.0 * (x * x - 1.0) * normal_pdf(x)).abs()
}

/// One validation grid entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub config: DetectorConfig,
    pub targets: TargetProbabilities,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRecord {
    pub config: DetectorConfig,
    pub threshold: f64,
    pub metric: Metric,
    pub analytic: f64,
    /// 99% Wilson interval.
    pub empirical: EmpiricalRate,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub records: Vec<ValidationRecord>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub const CSV_HEADER: [&'static str; 11] = [
        "n",
        "snr_self_db",
        "snr_other_db",
        "eta",
        "threshold",
        "metric",
        "analytic",
        "empirical",
        "ci_low",
        "ci_high",
        "pass",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = crate::study::csv_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.config.num_samples.to_string(),
                linear_to_db(r.config.snr_self).to_string(),
                linear_to_db(r.config.snr_other).to_string(),
                r.config.sic_factor.to_string(),
                r.threshold.to_string(),
                r.metric.label().to_string(),
                r.analytic.to_string(),
                r.empirical.rate.to_string(),
                r.empirical.ci_low.to_string(),
                r.empirical.ci_high.to_string(),
                r.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Estimates all four probabilities at every grid point and compares them
/// with the closed forms.
///
/// Each trial synthesises one realisation of noise, symbols and phases and
/// evaluates the energy under all four hypotheses from it, so the four
/// estimates at a point are correlated with each other but each one is an
/// ordinary binomial estimate. A record passes when the analytic value lies
/// inside the 99% Wilson interval widened by `BASE_TOLERANCE` plus the
/// [`clt_allowance`].
pub fn validate_grid(grid: &[GridPoint], trials: u64, seed: u64) -> Result<ValidationReport> {
    validate_grid_with(grid, Modulation::default(), trials, seed)
}

pub fn validate_grid_with(
    grid: &[GridPoint],
    modulation: Modulation,
    trials: u64,
    seed: u64,
) -> Result<ValidationReport> {
    if grid.is_empty() {
        return Err(Error::config("validation grid is empty"));
    }
    check_trials(trials)?;
    let mut records = Vec::with_capacity(grid.len() * 4);
    for (index, point) in grid.iter().enumerate() {
        let cfg = point.config;
        cfg.validate()?;
        let pair = cfg.thresholds(&point.targets)?;
        let point_seed = derive_seed(seed, &[index as u64]);
        let counts = (0..trials)
            .into_par_iter()
            .fold(
                || [0u64; 4],
                |mut acc, i| {
                    let e = joint_energies(&cfg, modulation, &mut stream(point_seed, i));
                    for m in Metric::ALL {
                        let eps = if m.is_during() {
                            pair.eps_during
                        } else {
                            pair.eps_before
                        };
                        if decide(e[m.hypothesis().index()], eps) {
                            acc[m as usize] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(
                || [0u64; 4],
                |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
            );

        for m in Metric::ALL {
            let threshold = if m.is_during() {
                pair.eps_during
            } else {
                pair.eps_before
            };
            let analytic = m.analytic(&cfg, threshold);
            let empirical = EmpiricalRate::wilson(counts[m as usize], trials, 0.99)?;
            let tolerance = BASE_TOLERANCE + clt_allowance(m.hypothesis(), &cfg, threshold);
            let pass = analytic >= empirical.ci_low - tolerance
                && analytic <= empirical.ci_high + tolerance;
            records.push(ValidationRecord {
                config: cfg,
                threshold,
                metric: m,
                analytic,
                empirical,
                tolerance,
                pass,
            });
        }
    }
    Ok(ValidationReport { records })
}

/// Empirical in-transmission rates at each threshold of `eps_grid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityRow {
    pub threshold: f64,
    pub pd_during: EmpiricalRate,
    pub pf_during: EmpiricalRate,
}

/// Sweeps the in-transmission threshold. All thresholds are applied to the
/// same simulated energies (common random numbers), so the estimated rates
/// are exactly nonincreasing along an increasing grid.
pub fn threshold_sensitivity(
    cfg: &DetectorConfig,
    eps_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SensitivityRow>> {
    if eps_grid.is_empty() {
        return Err(Error::config("threshold grid is empty"));
    }
    cfg.validate()?;
    check_trials(trials)?;
    let k = eps_grid.len();
    let zero = || (vec![0u64; k], vec![0u64; k]);
    let (pd, pf) = (0..trials)
        .into_par_iter()
        .fold(zero, |(mut pd, mut pf), i| {
            let e = joint_energies(cfg, Modulation::default(), &mut stream(seed, i));
            for (j, &eps) in eps_grid.iter().enumerate() {
                pd[j] += decide(e[Hypothesis::SelfAndOther.index()], eps) as u64;
                pf[j] += decide(e[Hypothesis::SelfOnly.index()], eps) as u64;
            }
            (pd, pf)
        })
        .reduce(zero, |(mut a, mut b), (c, d)| {
            a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
            b.iter_mut().zip(d).for_each(|(x, y)| *x += y);
            (a, b)
        });
    eps_grid
        .iter()
        .enumerate()
        .map(|(j, &threshold)| {
            Ok(SensitivityRow {
                threshold,
                pd_during: EmpiricalRate::wilson(pd[j], trials, 0.95)?,
                pf_during: EmpiricalRate::wilson(pf[j], trials, 0.95)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn cfg(n: usize, y1: f64, y2: f64, eta: f64) -> DetectorConfig {
        DetectorConfig::new(n, 1.0, y1, y2, eta).unwrap()
    }

    #[test]
    fn wilson_properties() {
        let r = EmpiricalRate::wilson(0, 1000, 0.95).unwrap();
        assert_eq!(r.rate, 0.0);
        assert_eq!(r.ci_low, 0.0);
        assert!(r.ci_high > 0.0 && r.ci_high < 0.01);
        let r = EmpiricalRate::wilson(1000, 1000, 0.95).unwrap();
        assert_eq!(r.ci_high, 1.0);
        let r = EmpiricalRate::wilson(50, 100, 0.95).unwrap();
        // Textbook Wilson interval for 50/100: [0.4038, 0.5962].
        assert!((r.ci_low - 0.4038).abs() < 1e-4 && (r.ci_high - 0.5962).abs() < 1e-4);
        assert!(EmpiricalRate::wilson(5, 0, 0.95).is_err());
        assert!(EmpiricalRate::wilson(5, 4, 0.95).is_err());
    }

    #[test]
    fn wilson_coverage() {
        for p in [0.01, 0.1, 0.5, 0.9] {
            let mut rng = stream(77, (p * 1000.0) as u64);
            let covered = (0..1000)
                .filter(|_| {
                    let hits = (0..500).filter(|_| rng.random::<f64>() < p).count() as u64;
                    let r = EmpiricalRate::wilson(hits, 500, 0.95).unwrap();
                    r.ci_low <= p && p <= r.ci_high
                })
                .count();
            assert!(covered >= 930, "p={p}: coverage {covered}/1000");
        }
    }

    #[test]
    fn median_threshold() {
        let c = cfg(1000, 10.0, 0.1, 0.1);
        let r = estimate_rate(Hypothesis::Idle, &c, 1.0, 100_000, 3).unwrap();
        // The energy is right-skewed, so slightly under half the draws exceed the mean.
        let skew = clt_allowance(Hypothesis::Idle, &c, 1.0);
        assert!(skew > 0.003 && skew < 0.005, "{skew}");
        let sigma = EmpiricalRate::binomial_sigma(0.5, 100_000);
        assert!((r.rate - (0.5 - skew)).abs() < 4.0 * sigma, "{}", r.rate);
    }

    #[test]
    fn perfect_cancellation_matches_idle_false_alarm() {
        let c = cfg(1000, 10.0, 0.1, 0.0);
        let eps = c.threshold_before(0.9).unwrap();
        let r = estimate_rate(Hypothesis::SelfOnly, &c, eps, 20_000, 8).unwrap();
        let analytic = c.pf_before(eps);
        let tol = BASE_TOLERANCE + clt_allowance(Hypothesis::SelfOnly, &c, eps);
        assert!(
            analytic >= r.ci_low - tol && analytic <= r.ci_high + tol,
            "{r:?} vs {analytic}"
        );
    }

    #[test]
    fn operating_point_detection() {
        // SNR1 = 10 dB, SNR2 = -10 dB, eta = 0.1, target 0.9.
        let c = cfg(1000, 10.0, 0.1, 0.1);
        let eps1 = c.threshold_during(0.9).unwrap();
        let trials = 20_000;
        let r = estimate_rate(Hypothesis::SelfAndOther, &c, eps1, trials, 9).unwrap();
        let sigma = EmpiricalRate::binomial_sigma(0.9, trials);
        let bias = BASE_TOLERANCE + clt_allowance(Hypothesis::SelfAndOther, &c, eps1);
        assert!((r.rate - 0.9).abs() < 3.0 * sigma + bias, "{}", r.rate);
    }

    #[test]
    fn estimate_is_deterministic() {
        let c = cfg(200, 10.0, 0.1, 0.1);
        let a = estimate_rate(Hypothesis::OtherTransmitting, &c, 1.05, 500, 1).unwrap();
        let b = estimate_rate(Hypothesis::OtherTransmitting, &c, 1.05, 500, 1).unwrap();
        assert_eq!(a, b);
        assert!(estimate_rate(Hypothesis::Idle, &c, 1.0, 99, 1).is_err());
    }

    #[test]
    fn trivial_grid_point_passes() {
        let grid = [GridPoint {
            config: cfg(1000, 10.0, 0.1, 0.0),
            targets: TargetProbabilities::equal(0.9).unwrap(),
        }];
        let report = validate_grid(&grid, 20_000, 5).unwrap();
        assert_eq!(report.records.len(), 4);
        assert!(
            report.all_pass(),
            "{:?}",
            report.failures().collect::<Vec<_>>()
        );
        assert_eq!(report, validate_grid(&grid, 20_000, 5).unwrap());
        assert!(validate_grid(&[], 1000, 5).is_err());
    }

    #[test]
    fn eta_sweep_raises_thresholds_and_keeps_detection() {
        let targets = TargetProbabilities::equal(0.9).unwrap();
        let grid: Vec<GridPoint> = [0.0, 0.2, 0.4]
            .iter()
            .map(|&eta| GridPoint {
                config: cfg(1000, 10.0, 0.1, eta),
                targets,
            })
            .collect();
        let report = validate_grid(&grid, 20_000, 6).unwrap();
        let pd: Vec<&ValidationRecord> = report
            .records
            .iter()
            .filter(|r| r.metric == Metric::PdDuring)
            .collect();
        assert!(pd.windows(2).all(|w| w[1].threshold > w[0].threshold));
        for r in &pd {
            assert!((r.empirical.rate - 0.9).abs() < 0.02, "{r:?}");
        }
        assert!(report.all_pass());
    }

    #[test]
    fn sensitivity_is_monotone_and_crosses_median() {
        let c = cfg(1000, 10.0, 0.1, 0.1);
        let mu3 = Hypothesis::SelfAndOther.mean_energy(&c);
        let grid = [mu3 - 0.02, mu3 - 0.005, mu3 + 0.005, mu3 + 0.02];
        let rows = threshold_sensitivity(&c, &grid, 5_000, 4).unwrap();
        assert!(rows.windows(2).all(|w| {
            w[1].pd_during.successes <= w[0].pd_during.successes
                && w[1].pf_during.successes <= w[0].pf_during.successes
        }));
        assert!(rows[1].pd_during.rate > 0.5 && rows[2].pd_during.rate < 0.5);
        assert!(threshold_sensitivity(&c, &[], 1000, 4).is_err());
    }

    #[test]
    fn small_threshold_step_moves_rates_a_lot() {
        // Around the operating point a 0.025 dB step in a large-N detector
        // swings both probabilities by tens of percentage points.
        let c = cfg(100_000, 10.0, 0.0, 0.0);
        let lo = crate::units::db_to_linear(0.0);
        let hi = crate::units::db_to_linear(0.025);
        let rows = threshold_sensitivity(&c, &[lo, hi], 200, 12).unwrap();
        let drift = rows[0].pf_during.rate - rows[1].pf_during.rate;
        assert!(drift > 0.3, "{drift}");
    }
}
