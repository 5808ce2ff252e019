//! Shapley effects of the plate buckling strength model under normal and
//! log-normal inputs, and the convergence of the sample-mean SSE.
//!
//! cargo run --release --example plate_buckling -- [N] [SEED]

use shapley_effects::{
    convergence_study, estimate_shapley_all, EstimatorConfig, EstimatorKind, ModelFunction,
    PlateBuckling, StudyConfig,
};

fn main() -> shapley_effects::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(1 << 14) as usize;
    let seed = args.next().unwrap_or(3);

    let f = ModelFunction::new(PlateBuckling);
    let space = PlateBuckling::input_space();
    println!(
        "strength at the means: {:.4}",
        PlateBuckling::value(&PlateBuckling::means())?
    );

    let r = estimate_shapley_all(&f, &space, &EstimatorConfig::new(n, seed))?;
    let var = r.variance.as_ref().unwrap();
    println!(
        "{:>20} {:>12} {:>8} {:>12}",
        "input", "shapley", "share", "std. error"
    );
    for (j, (label, ..)) in PlateBuckling::INPUTS.iter().enumerate() {
        println!(
            "{:>20} {:>12.4e} {:>7.1}% {:>12.2e}",
            label,
            r.estimates[j],
            100.0 * r.estimates[j] / r.sigma2_estimate,
            var[j].sqrt()
        );
    }

    let cfg = StudyConfig {
        kind: EstimatorKind::Shapley,
        sample_sizes: (8..=12).map(|k| 1 << k).collect(),
        trials: 10,
        base_seed: seed,
        workers: 1,
        reference: None,
    };
    let study = convergence_study("plate-buckling", &f, &space, &cfg)?;
    for (n, m) in study.sample_sizes.iter().zip(&study.mean_sse) {
        println!("N = {n:>5}  sample-mean SSE = {m:.3e}");
    }
    if let Some(s) = study.fitted_slope {
        println!("fitted slope {s:.3}");
    }
    Ok(())
}
