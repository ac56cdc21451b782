//! Analytic study tables. Each row type knows its CSV header.

use crate::detector::{DetectorConfig, TargetProbabilities};
use crate::error::{Error, Result};
use crate::montecarlo::SensitivityRow;
use crate::units::db_to_linear;
use crate::waveform::SensingWindow;

use super::fmt_db;

pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn cells(values: &[f64]) -> Vec<String> {
    values.iter().map(f64::to_string).collect()
}

fn sorted(values: &[f64], what: &str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::config(format!("{what} list is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::config(format!(
            "{what} list contains a non-finite value"
        )));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

/// Thresholds before and during transmission for one SIC factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub eta: f64,
    pub eps_before: f64,
    pub eps_during: f64,
    /// `threshold_link(eps_before)`; equals `eps_during` for equal targets.
    pub eps_linked: f64,
}

impl CsvRow for ThresholdRow {
    const HEADER: &'static [&'static str] =
        &["eta", "eps_before", "eps_during", "eps_linked", "gap"];
    fn cells(&self) -> Vec<String> {
        cells(&[
            self.eta,
            self.eps_before,
            self.eps_during,
            self.eps_linked,
            self.eps_during - self.eps_before,
        ])
    }
}

pub fn threshold_table(
    cfg: &DetectorConfig,
    targets: &TargetProbabilities,
    etas: &[f64],
) -> Result<Vec<ThresholdRow>> {
    sorted(etas, "SIC factor")?
        .into_iter()
        .map(|eta| {
            let c = cfg.with_sic_factor(eta);
            c.validate()?;
            let pair = c.thresholds(targets)?;
            Ok(ThresholdRow {
                eta,
                eps_before: pair.eps_before,
                eps_during: pair.eps_during,
                eps_linked: c.threshold_link(pair.eps_before),
            })
        })
        .collect()
}

/// Analytic in-transmission operating point at a given threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocRow {
    pub eta: f64,
    pub threshold: f64,
    pub pd_during: f64,
    pub pf_during: f64,
}

impl CsvRow for RocRow {
    const HEADER: &'static [&'static str] = &["eta", "threshold", "threshold_db", "pd_dt", "pf_dt"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.eta.to_string(),
            self.threshold.to_string(),
            fmt_db(self.threshold),
            self.pd_during.to_string(),
            self.pf_during.to_string(),
        ]
    }
}

/// One curve per SIC factor, sorted by (eta, threshold).
pub fn roc_curves(cfg: &DetectorConfig, etas: &[f64], thresholds: &[f64]) -> Result<Vec<RocRow>> {
    let thresholds = sorted(thresholds, "threshold")?;
    if thresholds[0] <= 0.0 {
        return Err(Error::NonPositiveThreshold {
            threshold: thresholds[0],
        });
    }
    let mut rows = Vec::new();
    for eta in sorted(etas, "SIC factor")? {
        let c = cfg.with_sic_factor(eta);
        c.validate()?;
        rows.extend(thresholds.iter().map(|&eps| RocRow {
            eta,
            threshold: eps,
            pd_during: c.pd_during(eps),
            pf_during: c.pf_during(eps),
        }));
    }
    Ok(rows)
}

/// Dynamic in-transmission threshold at one SIC factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicRow {
    pub eta: f64,
    pub eps_during: f64,
    pub pd_during: f64,
    pub pf_during: f64,
}

impl CsvRow for SicRow {
    const HEADER: &'static [&'static str] = &["eta", "eps_during", "pd_dt", "pf_dt"];
    fn cells(&self) -> Vec<String> {
        cells(&[self.eta, self.eps_during, self.pd_during, self.pf_during])
    }
}

pub fn sic_sweep(
    cfg: &DetectorConfig,
    targets: &TargetProbabilities,
    etas: &[f64],
) -> Result<Vec<SicRow>> {
    sorted(etas, "SIC factor")?
        .into_iter()
        .map(|eta| {
            let c = cfg.with_sic_factor(eta);
            c.validate()?;
            let eps = c.threshold_during(targets.target_pd_during)?;
            Ok(SicRow {
                eta,
                eps_during: eps,
                pd_during: c.pd_during(eps),
                pf_during: c.pf_during(eps),
            })
        })
        .collect()
}

/// Dynamic versus fixed in-transmission threshold at one measured SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyRow {
    pub snr_other: f64,
    pub eps_dynamic: f64,
    pub pd_dynamic: f64,
    pub pf_dynamic: f64,
    pub eps_fixed: f64,
    pub pd_fixed: f64,
    pub pf_fixed: f64,
}

impl CsvRow for StrategyRow {
    const HEADER: &'static [&'static str] = &[
        "snr_other_db",
        "eps_dynamic",
        "pd_dynamic",
        "pf_dynamic",
        "eps_fixed",
        "pd_fixed",
        "pf_fixed",
    ];
    fn cells(&self) -> Vec<String> {
        let mut v = vec![fmt_db(self.snr_other)];
        v.extend(cells(&[
            self.eps_dynamic,
            self.pd_dynamic,
            self.pf_dynamic,
            self.eps_fixed,
            self.pd_fixed,
            self.pf_fixed,
        ]));
        v
    }
}

/// The fixed threshold is computed once at the lowest SNR of the sweep and
/// held; the dynamic one is recomputed at every point.
pub fn compare_fixed_vs_dynamic(
    cfg: &DetectorConfig,
    targets: &TargetProbabilities,
    snrs_db: &[f64],
) -> Result<Vec<StrategyRow>> {
    let snrs = sorted(snrs_db, "SNR")?;
    let target = targets.target_pd_during;
    let calibration = cfg.with_snr_other(db_to_linear(snrs[0]));
    calibration.validate()?;
    let eps_fixed = calibration.threshold_during(target)?;
    snrs.into_iter()
        .map(|db| {
            let c = cfg.with_snr_other(db_to_linear(db));
            c.validate()?;
            let eps = c.threshold_during(target)?;
            Ok(StrategyRow {
                snr_other: c.snr_other,
                eps_dynamic: eps,
                pd_dynamic: c.pd_during(eps),
                pf_dynamic: c.pf_during(eps),
                eps_fixed,
                pd_fixed: c.pd_during(eps_fixed),
                pf_fixed: c.pf_during(eps_fixed),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingTimeRow {
    pub sensing_time: f64,
    pub num_samples: usize,
    pub eps_before: f64,
    pub pd_before: f64,
    pub pf_before: f64,
    pub eps_during: f64,
    pub pd_during: f64,
    pub pf_during: f64,
}

impl CsvRow for SensingTimeRow {
    const HEADER: &'static [&'static str] = &[
        "sensing_time_s",
        "n",
        "eps_before",
        "pd_bt",
        "pf_bt",
        "eps_during",
        "pd_dt",
        "pf_dt",
    ];
    fn cells(&self) -> Vec<String> {
        let mut v = vec![self.sensing_time.to_string(), self.num_samples.to_string()];
        v.extend(cells(&[
            self.eps_before,
            self.pd_before,
            self.pf_before,
            self.eps_during,
            self.pd_during,
            self.pf_during,
        ]));
        v
    }
}

/// Dynamic thresholds at each sensing time for a fixed sample rate.
pub fn sensing_time_sweep(
    cfg: &DetectorConfig,
    targets: &TargetProbabilities,
    sensing_times: &[f64],
    sample_rate: f64,
) -> Result<Vec<SensingTimeRow>> {
    sorted(sensing_times, "sensing time")?
        .into_iter()
        .map(|tau| {
            let n = SensingWindow::new(tau, sample_rate)?.num_samples()?;
            let c = cfg.with_num_samples(n);
            c.validate()?;
            let pair = c.thresholds(targets)?;
            Ok(SensingTimeRow {
                sensing_time: tau,
                num_samples: n,
                eps_before: pair.eps_before,
                pd_before: c.pd_before(pair.eps_before),
                pf_before: c.pf_before(pair.eps_before),
                eps_during: pair.eps_during,
                pd_during: c.pd_during(pair.eps_during),
                pf_during: c.pf_during(pair.eps_during),
            })
        })
        .collect()
}

/// Averages over a uniformly fluctuating SIC factor at one SNR. The threshold
/// is set for the nominal factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationRow {
    pub snr_other: f64,
    pub eta0: f64,
    pub m: f64,
    pub eps_during: f64,
    pub pf_nominal: f64,
    pub pf_avg_numeric: f64,
    pub pf_avg_approx: f64,
    pub pd_nominal: f64,
    pub pd_avg_numeric: f64,
}

impl CsvRow for FluctuationRow {
    const HEADER: &'static [&'static str] = &[
        "snr_other_db",
        "eta0",
        "m",
        "eps_during",
        "pf_nominal",
        "pf_avg_numeric",
        "pf_avg_approx",
        "pd_nominal",
        "pd_avg_numeric",
    ];
    fn cells(&self) -> Vec<String> {
        let mut v = vec![fmt_db(self.snr_other)];
        v.extend(cells(&[
            self.eta0,
            self.m,
            self.eps_during,
            self.pf_nominal,
            self.pf_avg_numeric,
            self.pf_avg_approx,
            self.pd_nominal,
            self.pd_avg_numeric,
        ]));
        v
    }
}

/// Rows sorted by (eta0, SNR). The half-width is `fraction * eta0`.
pub fn fluctuation_study(
    cfg: &DetectorConfig,
    targets: &TargetProbabilities,
    eta0s: &[f64],
    fraction: f64,
    snrs_db: &[f64],
) -> Result<Vec<FluctuationRow>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::config(format!(
            "fluctuation fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let snrs = sorted(snrs_db, "SNR")?;
    let mut rows = Vec::new();
    for eta0 in sorted(eta0s, "SIC factor")? {
        let m = fraction * eta0;
        for &db in &snrs {
            let c = cfg.with_snr_other(db_to_linear(db)).with_sic_factor(eta0);
            c.validate()?;
            let eps = c.threshold_during(targets.target_pd_during)?;
            rows.push(FluctuationRow {
                snr_other: c.snr_other,
                eta0,
                m,
                eps_during: eps,
                pf_nominal: c.pf_during(eps),
                pf_avg_numeric: c.avg_pf_fluct_numeric(eps, eta0, m)?,
                pf_avg_approx: c.avg_pf_fluct_approx(eps, eta0, m)?,
                pd_nominal: c.pd_during(eps),
                pd_avg_numeric: c.avg_pd_fluct_numeric(eps, eta0, m)?,
            });
        }
    }
    Ok(rows)
}

/// A [`SensitivityRow`] with the matching closed-form values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SensitivityLine {
    pub row: SensitivityRow,
    pub config: DetectorConfig,
}

impl CsvRow for SensitivityLine {
    const HEADER: &'static [&'static str] = &[
        "threshold",
        "threshold_db",
        "pd_dt",
        "pd_dt_low",
        "pd_dt_high",
        "pd_dt_analytic",
        "pf_dt",
        "pf_dt_low",
        "pf_dt_high",
        "pf_dt_analytic",
    ];
    fn cells(&self) -> Vec<String> {
        let (r, c) = (&self.row, &self.config);
        let mut v = vec![r.threshold.to_string(), fmt_db(r.threshold / c.noise_power)];
        v.extend(cells(&[
            r.pd_during.rate,
            r.pd_during.ci_low,
            r.pd_during.ci_high,
            c.pd_during(r.threshold),
            r.pf_during.rate,
            r.pf_during.ci_low,
            r.pf_during.ci_high,
            c.pf_during(r.threshold),
        ]));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> (DetectorConfig, TargetProbabilities) {
        (
            DetectorConfig::new(1000, 1.0, 10.0, 0.1, 0.1).unwrap(),
            TargetProbabilities::equal(0.9).unwrap(),
        )
    }

    #[test]
    fn perfect_sic_row_is_degenerate() {
        let (c, t) = base();
        let rows = threshold_table(&c, &t, &[0.2, 0.0, 0.1]).unwrap();
        assert_eq!(rows[0].eta, 0.0);
        assert_eq!(rows[0].eps_before, rows[0].eps_during);
        assert!(rows.windows(2).all(|w| w[0].eta < w[1].eta));
        for r in &rows {
            assert!((r.eps_linked - r.eps_during).abs() < 1e-9);
        }
    }

    #[test]
    fn strategies_coincide_at_calibration() {
        let (c, t) = base();
        let rows = compare_fixed_vs_dynamic(&c, &t, &[-20.0, -10.0, 0.0]).unwrap();
        assert_eq!(rows[0].eps_fixed, rows[0].eps_dynamic);
        assert_eq!(rows[0].pf_fixed, rows[0].pf_dynamic);
        for r in &rows[1..] {
            assert!(r.pf_fixed >= r.pf_dynamic);
            assert!(r.pd_fixed >= r.pd_dynamic);
        }
    }

    #[test]
    fn dynamic_threshold_pins_detection() {
        let (c, t) = base();
        for r in sic_sweep(&c, &t, &[0.0, 0.1, 0.2, 0.3, 0.4]).unwrap() {
            assert!((r.pd_during - 0.9).abs() < 1e-9);
        }
        for r in sensing_time_sweep(&c, &t, &[5e-6, 1e-5, 2e-5], 20e6).unwrap() {
            assert!((r.pd_during - 0.9).abs() < 1e-9);
            assert!((r.pd_before - 0.9).abs() < 1e-9);
        }
    }

    #[test]
    fn roc_rejects_nonpositive_threshold() {
        let (c, _) = base();
        assert!(roc_curves(&c, &[0.1], &[0.0, 1.0]).is_err());
        assert_eq!(roc_curves(&c, &[0.1, 0.2], &[1.0, 2.0]).unwrap().len(), 4);
    }
}
