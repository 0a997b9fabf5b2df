//! Runs a TOML experiment config the way the `mqnc` binary does, and writes
//! the JSON record and CSV table under `target/example-output/`.
//!
//! cargo run --release --example config_runner -- crates/core/examples/configs/sweep.toml

use std::path::PathBuf;

use mqnc::experiment::{emit, run, ExperimentConfig};

fn main() -> mqnc::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/protocol.toml").into());
    let mut config = ExperimentConfig::from_toml(&std::fs::read_to_string(&path)?)?;
    let stem = PathBuf::from(&path).file_stem().unwrap().to_string_lossy().into_owned();
    let out = PathBuf::from("target/example-output");
    config.output.json = Some(out.join(format!("{stem}.json")));
    config.output.csv = Some(out.join(format!("{stem}.csv")));

    let record = run(&config)?;
    for p in emit(&record, &config.output)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
