//! Runs one of the bundled experiment configs and lists the artifacts.
//! Usage: `cargo run --example run_config -- configs/rabi.toml`.

use std::path::PathBuf;

use wgqed::io::{run, ExperimentConfig};

fn main() -> wgqed::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/transmission.toml")));
    let (cfg, _) = ExperimentConfig::load(&path)?;
    let dir = std::env::temp_dir().join("wgqed-example");
    let report = run(&cfg, Some(&dir))?;
    for f in &report.files {
        println!("{}", f.display());
    }
    println!("{}", serde_json::to_string_pretty(&report.results).unwrap_or_default());
    Ok(())
}
