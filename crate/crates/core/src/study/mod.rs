//! Parameter studies behind the `fd-sense` command line: configuration,
//! dispatch and CSV output.

mod config;
mod tables;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use config::{
    ConfigDocument, DetectorSection, Range, Snr, SweepSection, TargetsSection, VanetSection,
};
pub use tables::{
    compare_fixed_vs_dynamic, fluctuation_study, roc_curves, sensing_time_sweep, sic_sweep,
    threshold_table, CsvRow, FluctuationRow, RocRow, SensingTimeRow, SicRow, StrategyRow,
    ThresholdRow,
};

use crate::error::{Error, Result};
use crate::montecarlo::{self, GridPoint, DEFAULT_TRIALS};
use crate::rng::DEFAULT_SEED;
use crate::units::{db_to_linear, linear_to_db};
use crate::vanet::sweep_density;

/// CSV writer with LF line endings.
pub fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Writes a header and rows.
pub fn write_rows<W: Write, R: CsvRow>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Thresholds,
    Roc,
    Validate,
    Sensitivity,
    SicSweep,
    SensingTimeSweep,
    Fluctuation,
    Vanet,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Thresholds,
        Command::Roc,
        Command::Validate,
        Command::Sensitivity,
        Command::SicSweep,
        Command::SensingTimeSweep,
        Command::Fluctuation,
        Command::Vanet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Thresholds => "thresholds",
            Command::Roc => "roc",
            Command::Validate => "validate",
            Command::Sensitivity => "sensitivity",
            Command::SicSweep => "sic-sweep",
            Command::SensingTimeSweep => "sensing-time-sweep",
            Command::Fluctuation => "fluctuation",
            Command::Vanet => "vanet",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                Error::config(format!(
                    "unknown command `{s}` (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub document: ConfigDocument,
    /// `None` writes the primary table to stdout.
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    /// Monte Carlo trials per point; for `vanet`, replicates per cell.
    pub trials: Option<u64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            document: ConfigDocument::default(),
            output_path: None,
            seed: DEFAULT_SEED,
            trials: None,
        }
    }

    /// Builds a run from command-line pieces. `config_path` is read as JSON.
    pub fn from_args(
        command: &str,
        config_path: Option<&Path>,
        overrides: &[String],
        output_path: Option<PathBuf>,
        seed: Option<u64>,
        trials: Option<u64>,
    ) -> Result<Self> {
        let command = command.parse()?;
        let text = config_path.map(fs::read_to_string).transpose()?;
        let document = ConfigDocument::load(text.as_deref(), overrides)?;
        Ok(Self {
            command,
            document,
            output_path,
            seed: seed.unwrap_or(DEFAULT_SEED),
            trials,
        })
    }
}

/// One CSV output. The primary artifact has no suffix; companions are
/// written next to it as `<stem>.<suffix>.csv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub suffix: Option<&'static str>,
    pub bytes: Vec<u8>,
}

fn artifact<R: CsvRow>(suffix: Option<&'static str>, rows: &[R]) -> Result<Artifact> {
    let mut bytes = Vec::new();
    write_rows(&mut bytes, rows)?;
    Ok(Artifact { suffix, bytes })
}

fn db_values(r: &Range) -> Result<Vec<f64>> {
    Ok(r.values()?.into_iter().map(db_to_linear).collect())
}

/// Computes every artifact of a run in memory.
pub fn render(run: &RunConfig) -> Result<Vec<Artifact>> {
    let doc = &run.document;
    let cfg = doc.detector.config()?;
    let targets = doc.targets.targets()?;
    let sweep = &doc.sweep;
    let trials = run.trials.unwrap_or(DEFAULT_TRIALS);
    match run.command {
        Command::Thresholds => {
            let rows = threshold_table(&cfg, &targets, &sweep.eta.values()?)?;
            Ok(vec![artifact(None, &rows)?])
        }
        Command::Roc => {
            let eps: Vec<f64> = db_values(&sweep.threshold_db)?
                .into_iter()
                .map(|x| x * cfg.noise_power)
                .collect();
            let rows = roc_curves(&cfg, &sweep.roc_etas, &eps)?;
            Ok(vec![artifact(None, &rows)?])
        }
        Command::Validate => {
            let mut grid = Vec::new();
            for &n in &sweep.grid_num_samples {
                for &snr in &sweep.grid_snr_other_db {
                    for &eta in &sweep.grid_etas {
                        let point = cfg
                            .with_num_samples(n)
                            .with_snr_other(db_to_linear(snr))
                            .with_sic_factor(eta);
                        grid.push(GridPoint {
                            config: point,
                            targets,
                        });
                    }
                }
            }
            let report =
                montecarlo::validate_grid_with(&grid, doc.detector.modulation, trials, run.seed)?;
            let mut bytes = Vec::new();
            report.write_csv(&mut bytes)?;
            Ok(vec![Artifact {
                suffix: None,
                bytes,
            }])
        }
        Command::Sensitivity => {
            let eps: Vec<f64> = db_values(&sweep.threshold_db)?
                .into_iter()
                .map(|x| x * cfg.noise_power)
                .collect();
            let rows = montecarlo::threshold_sensitivity(&cfg, &eps, trials, run.seed)?;
            let rows: Vec<_> = rows
                .into_iter()
                .map(|r| tables::SensitivityLine {
                    row: r,
                    config: cfg,
                })
                .collect();
            Ok(vec![artifact(None, &rows)?])
        }
        Command::SicSweep => {
            let rows = sic_sweep(&cfg, &targets, &sweep.eta.values()?)?;
            let strategy = compare_fixed_vs_dynamic(&cfg, &targets, &sweep.snr_other_db.values()?)?;
            Ok(vec![
                artifact(None, &rows)?,
                artifact(Some("fixed_vs_dynamic"), &strategy)?,
            ])
        }
        Command::SensingTimeSweep => {
            let rows = sensing_time_sweep(
                &cfg,
                &targets,
                &sweep.sensing_time.values()?,
                sweep.sample_rate,
            )?;
            Ok(vec![artifact(None, &rows)?])
        }
        Command::Fluctuation => {
            let rows = fluctuation_study(
                &cfg,
                &targets,
                &sweep.fluct_etas,
                sweep.fluct_fraction,
                &sweep.snr_other_db.values()?,
            )?;
            Ok(vec![artifact(None, &rows)?])
        }
        Command::Vanet => {
            let base = doc.scenario(run.seed)?;
            let replicates = match run.trials {
                Some(t) => u32::try_from(t)
                    .map_err(|_| Error::config(format!("replicate count {t} is too large")))?,
                None => doc.vanet.replicates,
            };
            let table = sweep_density(&base, &doc.vanet.densities, &doc.vanet.modes, replicates)?;
            let mut bytes = Vec::new();
            table.write_csv(&mut bytes)?;
            Ok(vec![Artifact {
                suffix: None,
                bytes,
            }])
        }
    }
}

/// Path of a companion artifact next to `primary`.
pub fn companion_path(primary: &Path, suffix: &str) -> PathBuf {
    let stem = primary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    primary.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Runs a command and writes its artifacts. Without an output path only the
/// primary table is written, to stdout.
pub fn run(run: &RunConfig) -> Result<()> {
    let artifacts = render(run)?;
    match &run.output_path {
        Some(path) => {
            for a in &artifacts {
                let target = match a.suffix {
                    None => path.clone(),
                    Some(s) => companion_path(path, s),
                };
                fs::write(&target, &a.bytes)?;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            if let Some(a) = artifacts.iter().find(|a| a.suffix.is_none()) {
                out.write_all(&a.bytes)?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

pub(crate) fn fmt_db(x: f64) -> String {
    linear_to_db(x).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert_eq!("plot".parse::<Command>().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn companion_naming() {
        assert_eq!(
            companion_path(Path::new("/tmp/out/fig7.csv"), "fixed_vs_dynamic"),
            PathBuf::from("/tmp/out/fig7.fixed_vs_dynamic.csv")
        );
    }

    #[test]
    fn thresholds_render_has_lf_and_header() {
        let a = render(&RunConfig::new(Command::Thresholds)).unwrap();
        let text = String::from_utf8(a[0].bytes.clone()).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("eta,eps_before,eps_during"));
        assert_eq!(text.lines().count(), 42);
    }

    #[test]
    fn infeasible_exit_code() {
        let mut run = RunConfig::new(Command::Thresholds);
        // A near-certain detection target over ten samples needs a negative threshold.
        run.document.targets.pd_during = 0.999999;
        run.document.detector.num_samples = 10;
        run.document.detector.snr_other = Snr(1.0);
        run.document.detector.snr_self = Snr(1.0);
        let err = render(&run).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }
}
