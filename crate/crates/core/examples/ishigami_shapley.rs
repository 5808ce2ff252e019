//! Shapley effects of the Ishigami function with confidence intervals,
//! compared against the closed-form values.
//!
//! cargo run --release --example ishigami_shapley -- [N] [SEED] [WORKERS]

use shapley_effects::{
    estimate_shapley_all, ishigami_exact, EstimatorConfig, Ishigami, ModelFunction,
};

fn main() -> shapley_effects::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(1 << 14) as usize;
    let seed = args.next().unwrap_or(2024);
    let workers = args.next().unwrap_or(1) as usize;

    let model = Ishigami::default();
    let exact = ishigami_exact(&model);
    let f = ModelFunction::new(model);
    let cfg = EstimatorConfig::new(n, seed).with_workers(workers);
    let report = estimate_shapley_all(&f, &Ishigami::input_space(), &cfg)?;

    let (lo, hi) = (
        report.ci_low.as_ref().unwrap(),
        report.ci_high.as_ref().unwrap(),
    );
    println!(
        "N = {n}, seed = {seed}, evaluations = {}",
        report.eval_count
    );
    println!(
        "{:>4} {:>10} {:>10} {:>22}",
        "var", "exact", "estimate", "95% CI"
    );
    for j in 0..report.d {
        println!(
            "{:>4} {:>10.4} {:>10.4}   [{:>8.4}, {:>8.4}]",
            j + 1,
            exact.shapley[j],
            report.estimates[j],
            lo[j],
            hi[j]
        );
    }
    println!(
        "sigma2: exact {:.4}, estimate {:.4}",
        exact.sigma2, report.sigma2_estimate
    );
    Ok(())
}
