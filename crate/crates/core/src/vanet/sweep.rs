use std::io::Write;

use rayon::prelude::*;

use super::{simulate, DuplexMode, VanetMetrics, VanetScenario};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// One replicate of one (density, mode) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateRow {
    pub density: f64,
    pub mode: DuplexMode,
    pub replicate: u32,
    pub metrics: VanetMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricStats {
    pub mean: f64,
    pub std: f64,
}

impl MetricStats {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count() as f64;
        if n == 0.0 {
            return Self::default();
        }
        let mean = values.clone().sum::<f64>() / n;
        let var = if n > 1.0 {
            values.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySummary {
    pub density: f64,
    pub mode: DuplexMode,
    pub collision_time: MetricStats,
    pub throughput: MetricStats,
    pub attempts: MetricStats,
    pub collisions: MetricStats,
    pub detected: MetricStats,
    pub false_alarms: MetricStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Sorted by (density, mode, replicate).
    pub rows: Vec<ReplicateRow>,
}

impl SweepTable {
    pub const CSV_HEADER: [&'static str; 9] = [
        "density",
        "mode",
        "replicate",
        "collision_time_s",
        "throughput",
        "attempts",
        "collisions",
        "detected",
        "false_alarms",
    ];

    /// Mean and standard deviation per (density, mode), in row order.
    pub fn summary(&self) -> Vec<DensitySummary> {
        let mut out = Vec::new();
        for chunk in self
            .rows
            .chunk_by(|a, b| a.density == b.density && a.mode == b.mode)
        {
            let m = chunk.iter().map(|r| r.metrics);
            out.push(DensitySummary {
                density: chunk[0].density,
                mode: chunk[0].mode,
                collision_time: MetricStats::of(m.clone().map(|m| m.total_collision_time)),
                throughput: MetricStats::of(m.clone().map(|m| m.normalized_throughput)),
                attempts: MetricStats::of(m.clone().map(|m| m.attempts as f64)),
                collisions: MetricStats::of(m.clone().map(|m| m.collisions as f64)),
                detected: MetricStats::of(m.clone().map(|m| m.detected_collisions as f64)),
                false_alarms: MetricStats::of(m.map(|m| m.false_alarms as f64)),
            });
        }
        out
    }

    pub fn mean_for(&self, density: f64, mode: DuplexMode) -> Option<DensitySummary> {
        self.summary()
            .into_iter()
            .find(|s| s.density == density && s.mode == mode)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = crate::study::csv_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.density.to_string(),
                r.mode.label().to_string(),
                r.replicate.to_string(),
                r.metrics.total_collision_time.to_string(),
                r.metrics.normalized_throughput.to_string(),
                r.metrics.attempts.to_string(),
                r.metrics.collisions.to_string(),
                r.metrics.detected_collisions.to_string(),
                r.metrics.false_alarms.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `repetitions` replicates for every density and mode. Replicate `r`
/// at a given density uses the same seed in both modes, so HD and FD-CD
/// see the same vehicle layout and CAM phases.
pub fn sweep_density(
    base: &VanetScenario,
    densities: &[f64],
    modes: &[DuplexMode],
    repetitions: u32,
) -> Result<SweepTable> {
    if densities.is_empty() {
        return Err(Error::config("density list is empty"));
    }
    if modes.is_empty() {
        return Err(Error::config("mode list is empty"));
    }
    if repetitions == 0 {
        return Err(Error::config("at least one repetition is required"));
    }
    base.validate()?;
    let mut jobs = Vec::new();
    for &density in densities {
        for &mode in modes {
            for replicate in 0..repetitions {
                jobs.push((density, mode, replicate));
            }
        }
    }
    let mut rows = jobs
        .into_par_iter()
        .map(|(density, mode, replicate)| {
            let scenario = VanetScenario {
                density,
                mode,
                seed: derive_seed(base.seed, &[density.to_bits(), replicate as u64]),
                ..base.clone()
            };
            simulate(&scenario).map(|metrics| ReplicateRow {
                density,
                mode,
                replicate,
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        a.density
            .total_cmp(&b.density)
            .then(a.mode.cmp(&b.mode))
            .then(a.replicate.cmp(&b.replicate))
    });
    rows.dedup_by(|a, b| a.density == b.density && a.mode == b.mode && a.replicate == b.replicate);
    Ok(SweepTable { rows })
}
