//! Estimating Shapley effects of a model that runs in a separate process.
//!
//! The process reads one request per line (space-separated inputs) and
//! answers each with one number per line. Any program works; this example
//! uses a shell loop around awk so it needs nothing beyond a POSIX system.
//!
//! cargo run --release --example external_model -- [N]

use shapley_effects::{
    estimate_shapley_all, EstimatorConfig, ExternalModel, InputSpace, ModelFunction,
};

const SCRIPT: &str = r#"while IFS= read -r line; do
  printf '%s\n' "$line" | awk '{ printf "%.17g\n", $1 + 2 * $2 + $1 * $3 }'
done"#;

fn main() -> shapley_effects::Result<()> {
    let n = std::env::args()
        .nth(1)
        .map_or(256, |a| a.parse().expect("sample size"));
    let f = ModelFunction::new(ExternalModel::spawn("sh", &["-c", SCRIPT], 3)?);
    let space = InputSpace::unit_cube(3)?;
    let r = estimate_shapley_all(&f, &space, &EstimatorConfig::new(n, 5))?;
    // V1 = 9/48, V2 = 1/3, V3 = 1/48, V13 = 1/144, split evenly between 1 and 3
    let exact = [
        9.0 / 48.0 + 1.0 / 288.0,
        1.0 / 3.0,
        1.0 / 48.0 + 1.0 / 288.0,
    ];
    println!("evaluations sent to the process: {}", r.eval_count);
    for (j, (est, ex)) in r.estimates.iter().zip(exact).enumerate() {
        println!("phi_{} = {est:.4} (exact {ex:.4})", j + 1);
    }
    println!(
        "sigma2 estimate = {:.4} (exact {:.4})",
        r.sigma2_estimate,
        exact.iter().sum::<f64>()
    );
    Ok(())
}
