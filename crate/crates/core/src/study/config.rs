//! The JSON configuration document and `key=value` overrides.
//!
//! SNR fields accept either a bare number (linear) or a string with a `dB`
//! suffix, e.g. `"snr_self": "10 dB"`.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::detector::{DetectorConfig, TargetProbabilities};
use crate::error::{Error, Result};
use crate::units::{db_to_linear, linear_to_db};
use crate::vanet::{DecisionModel, DuplexMode, Fading, VanetScenario};
use crate::waveform::Modulation;

/// A linear SNR that may be written in dB in configuration files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr(pub f64);

impl Snr {
    pub fn from_db(db: f64) -> Self {
        Snr(db_to_linear(db))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let (number, is_db) = match t.strip_suffix("dB").or_else(|| t.strip_suffix("db")) {
            Some(rest) => (rest.trim(), true),
            None => (t, false),
        };
        let v: f64 = number
            .parse()
            .map_err(|_| Error::config(format!("cannot parse SNR `{text}`")))?;
        Ok(if is_db { Snr::from_db(v) } else { Snr(v) })
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{} dB", linear_to_db(self.0)))
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct SnrVisitor;
        impl Visitor<'_> for SnrVisitor {
            type Value = Snr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a linear SNR or a string such as \"-10 dB\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Snr, E> {
                Ok(Snr(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Snr, E> {
                Ok(Snr(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Snr, E> {
                Ok(Snr(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Snr, E> {
                Snr::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(SnrVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub const fn new(start: f64, stop: f64, steps: usize) -> Self {
        Self { start, stop, steps }
    }

    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Result<Vec<f64>> {
        match self.steps {
            0 => Err(Error::config("a sweep range needs at least one step")),
            1 => Ok(vec![self.start]),
            n => {
                let span = self.stop - self.start;
                let last = (n - 1) as f64;
                Ok((0..n)
                    .map(|k| self.start + span * k as f64 / last)
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub num_samples: usize,
    pub noise_power: f64,
    pub snr_self: Snr,
    pub snr_other: Snr,
    pub sic_factor: f64,
    pub modulation: Modulation,
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self {
            num_samples: 1000,
            noise_power: 1.0,
            snr_self: Snr::from_db(10.0),
            snr_other: Snr::from_db(-10.0),
            sic_factor: 0.1,
            modulation: Modulation::Qpsk,
        }
    }
}

impl DetectorSection {
    pub fn config(&self) -> Result<DetectorConfig> {
        DetectorConfig::new(
            self.num_samples,
            self.noise_power,
            self.snr_self.0,
            self.snr_other.0,
            self.sic_factor,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TargetsSection {
    pub pd_before: f64,
    pub pd_during: f64,
}

impl Default for TargetsSection {
    fn default() -> Self {
        Self {
            pd_before: 0.9,
            pd_during: 0.9,
        }
    }
}

impl TargetsSection {
    pub fn targets(&self) -> Result<TargetProbabilities> {
        TargetProbabilities::new(self.pd_before, self.pd_during)
    }
}

/// Sweep axes for the detector studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// SIC factor axis (`thresholds`, `sic-sweep`).
    pub eta: Range,
    /// Colliding-vehicle SNR axis in dB (`fluctuation`, fixed-vs-dynamic).
    pub snr_other_db: Range,
    /// Threshold axis in dB relative to the noise power (`roc`, `sensitivity`).
    pub threshold_db: Range,
    /// One ROC curve per SIC factor.
    pub roc_etas: Vec<f64>,
    /// Sensing-time axis in seconds (`sensing-time-sweep`).
    pub sensing_time: Range,
    pub sample_rate: f64,
    /// Nominal SIC factors of the fluctuation study.
    pub fluct_etas: Vec<f64>,
    /// Fluctuation half-width as a fraction of the nominal SIC factor.
    pub fluct_fraction: f64,
    /// Validation grid.
    pub grid_num_samples: Vec<usize>,
    pub grid_snr_other_db: Vec<f64>,
    pub grid_etas: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            eta: Range::new(0.0, 0.4, 41),
            snr_other_db: Range::new(-20.0, 0.0, 21),
            threshold_db: Range::new(0.0, 5.0, 201),
            roc_etas: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            sensing_time: Range::new(5e-6, 50e-6, 10),
            sample_rate: 20e6,
            fluct_etas: vec![0.1, 0.2, 0.3],
            fluct_fraction: 0.1,
            grid_num_samples: vec![400, 1000],
            grid_snr_other_db: vec![-20.0, -15.0, -10.0, -5.0, 0.0],
            grid_etas: vec![0.0, 0.1, 0.3],
        }
    }
}

/// Line-network study parameters. The detector's SNR of itself and SIC factor
/// come from the `detector` section; the sample count follows from the
/// sensing time and sample rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VanetSection {
    pub densities: Vec<f64>,
    pub replicates: u32,
    pub modes: Vec<DuplexMode>,
    pub road_length_km: f64,
    pub tx_range_km: f64,
    pub packet_duration_s: f64,
    pub cam_interval_s: f64,
    pub sensing_time_s: f64,
    pub sample_rate_hz: f64,
    pub sim_duration_s: f64,
    pub edge_snr: Snr,
    pub path_loss_exponent: f64,
    pub pf_override: Option<f64>,
    pub fading: Fading,
    pub decisions: DecisionModel,
}

impl Default for VanetSection {
    fn default() -> Self {
        let s = VanetScenario::default();
        Self {
            densities: (0..=8).map(|k| 25.0 * k as f64).collect(),
            replicates: 20,
            modes: vec![DuplexMode::Hd, DuplexMode::FdCd],
            road_length_km: s.road_length,
            tx_range_km: s.tx_range,
            packet_duration_s: s.packet_duration,
            cam_interval_s: s.cam_interval,
            sensing_time_s: s.sensing_time,
            sample_rate_hz: s.sample_rate,
            sim_duration_s: s.sim_duration,
            edge_snr: Snr(s.edge_snr),
            path_loss_exponent: s.path_loss_exponent,
            pf_override: s.pf_override,
            fading: s.fading,
            decisions: s.decisions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigDocument {
    pub detector: DetectorSection,
    pub targets: TargetsSection,
    pub sweep: SweepSection,
    pub vanet: VanetSection,
}

impl ConfigDocument {
    /// Parses a JSON document and applies dotted `key=value` overrides,
    /// e.g. `detector.snr_self=10dB` or `vanet.densities=[0,50,100]`.
    pub fn load(json: Option<&str>, overrides: &[String]) -> Result<Self> {
        let mut root = match json {
            Some(text) => serde_json::from_str::<Value>(text)?,
            None => Value::Object(Map::new()),
        };
        if !root.is_object() {
            return Err(Error::config(
                "configuration document must be a JSON object",
            ));
        }
        for item in overrides {
            apply_override(&mut root, item)?;
        }
        serde_json::from_value(root).map_err(|e| Error::config(e.to_string()))
    }

    pub fn scenario(&self, seed: u64) -> Result<VanetScenario> {
        let v = &self.vanet;
        let d = &self.detector;
        let scenario = VanetScenario {
            density: v.densities.first().copied().unwrap_or(0.0),
            road_length: v.road_length_km,
            tx_range: v.tx_range_km,
            packet_duration: v.packet_duration_s,
            cam_interval: v.cam_interval_s,
            sensing_time: v.sensing_time_s,
            sample_rate: v.sample_rate_hz,
            sim_duration: v.sim_duration_s,
            mode: DuplexMode::Hd,
            detector: DetectorConfig {
                snr_other: v.edge_snr.0,
                ..d.config()?
            },
            targets: self.targets.targets()?,
            edge_snr: v.edge_snr.0,
            path_loss_exponent: v.path_loss_exponent,
            pf_override: v.pf_override,
            fading: v.fading,
            decisions: v.decisions,
            modulation: d.modulation,
            seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn apply_override(root: &mut Value, item: &str) -> Result<()> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override `{item}` is not of the form key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::config(format!("malformed override key `{path}`")));
    }
    let value = serde_json::from_str::<Value>(raw.trim())
        .unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = root;
    for key in &keys[..keys.len() - 1] {
        let map = node.as_object_mut().ok_or_else(|| {
            Error::config(format!("override `{path}` descends into a non-object"))
        })?;
        node = map
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    node.as_object_mut()
        .ok_or_else(|| Error::config(format!("override `{path}` descends into a non-object")))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_parsing() {
        assert_eq!(Snr::parse("10 dB").unwrap(), Snr(10.0));
        assert_eq!(Snr::parse("-10dB").unwrap().0, db_to_linear(-10.0));
        assert_eq!(Snr::parse("0.5").unwrap(), Snr(0.5));
        assert!(Snr::parse("loud").is_err());
    }

    #[test]
    fn defaults_without_document() {
        let doc = ConfigDocument::load(None, &[]).unwrap();
        assert_eq!(doc, ConfigDocument::default());
        let cfg = doc.detector.config().unwrap();
        assert_eq!(cfg.num_samples, 1000);
        assert_eq!(cfg.snr_self, 10.0);
    }

    #[test]
    fn document_and_overrides() {
        let json = r#"{"detector": {"snr_self": "20 dB", "sic_factor": 0.2},
                       "vanet": {"densities": [0, 50]}}"#;
        let doc = ConfigDocument::load(
            Some(json),
            &[
                "detector.sic_factor=0.3".into(),
                "targets.pd_during=0.5".into(),
                "detector.snr_other=-5dB".into(),
                "vanet.pf_override=0.01".into(),
                "vanet.modes=[\"FD-CD\"]".into(),
            ],
        )
        .unwrap();
        assert_eq!(doc.detector.snr_self, Snr(100.0));
        assert_eq!(doc.detector.sic_factor, 0.3);
        assert_eq!(doc.targets.pd_during, 0.5);
        assert_eq!(doc.detector.snr_other, Snr::from_db(-5.0));
        assert_eq!(doc.vanet.densities, vec![0.0, 50.0]);
        assert_eq!(doc.vanet.pf_override, Some(0.01));
        assert_eq!(doc.vanet.modes, vec![DuplexMode::FdCd]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigDocument::load(Some(r#"{"detectr": {}}"#), &[]).is_err());
        assert!(ConfigDocument::load(Some(r#"{"detector": {"snr": 1}}"#), &[]).is_err());
        assert!(ConfigDocument::load(None, &["sweep.nope=1".into()]).is_err());
        assert!(ConfigDocument::load(None, &["detector.num_samples=many".into()]).is_err());
        assert!(ConfigDocument::load(None, &["no_equals".into()]).is_err());
        assert!(ConfigDocument::load(Some("[1, 2]"), &[]).is_err());
    }

    #[test]
    fn range_values() {
        let v = Range::new(0.0, 0.4, 5).values().unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[4], 0.4);
        assert_eq!(v[1], 0.1);
        assert_eq!(Range::new(3.0, 9.0, 1).values().unwrap(), vec![3.0]);
        assert!(Range::new(0.0, 1.0, 0).values().is_err());
    }
}
