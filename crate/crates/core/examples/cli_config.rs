//! Driving an analysis from a JSON config, as the `shapley-effects` binary
//! does, and reading the report back.
//!
//! cargo run --release --example cli_config

use shapley_effects::cli::{cmd_analyze, AnalysisConfig, AnalysisReport};

const CONFIG: &str = r#"{
  "model": {"type": "sobol-g", "a": [0, 1, 9]},
  "estimator": "shapley",
  "n": 8192,
  "seed": 42
}"#;

fn main() -> shapley_effects::Result<()> {
    let config = AnalysisConfig::from_json(CONFIG)?;
    let report = cmd_analyze(&config)?;
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    println!("{json}");

    // the embedded config reproduces the run exactly
    let back: AnalysisReport = serde_json::from_str(&json).expect("report parses");
    let again = cmd_analyze(&back.config)?;
    assert!(again
        .results
        .iter()
        .zip(&report.results)
        .all(|(a, b)| a.estimate == b.estimate));
    eprintln!("rerun from the embedded config matches");
    Ok(())
}
