//! Driving a study from a JSON document plus overrides, as the CLI does.

use fd_sense::study::{render, Command, ConfigDocument, RunConfig};

fn main() -> fd_sense::Result<()> {
    let json = r#"{
        "detector": {"num_samples": 400, "snr_self": "10 dB", "snr_other": "-10 dB"},
        "targets": {"pd_before": 0.9, "pd_during": 0.5}
    }"#;
    let overrides = ["sweep.eta={\"start\": 0, \"stop\": 0.3, \"steps\": 4}".to_string()];
    let run = RunConfig {
        document: ConfigDocument::load(Some(json), &overrides)?,
        ..RunConfig::new(Command::SicSweep)
    };
    for artifact in render(&run)? {
        println!("-- {}", artifact.suffix.unwrap_or("main"));
        print!("{}", String::from_utf8_lossy(&artifact.bytes));
    }
    Ok(())
}
