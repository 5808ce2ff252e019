//! Mean SSE against N for the Ishigami function, with the fitted log-log
//! slope. The CSV goes to stdout.
//!
//! cargo run --release --example convergence_study -- [TRIALS] [SEED]

use shapley_effects::{
    convergence_study, ishigami_exact, EstimatorKind, Ishigami, ModelFunction, StudyConfig,
};

fn main() -> shapley_effects::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let trials = args.next().unwrap_or(10) as usize;
    let seed = args.next().unwrap_or(1);

    let model = Ishigami::default();
    let cfg = StudyConfig {
        kind: EstimatorKind::Shapley,
        sample_sizes: (8..=14).map(|k| 1 << k).collect(),
        trials,
        base_seed: seed,
        workers: 1,
        reference: Some(ishigami_exact(&model).shapley),
    };
    let f = ModelFunction::new(model);
    let study = convergence_study("ishigami", &f, &Ishigami::input_space(), &cfg)?;
    study.write_csv(&mut std::io::stdout().lock())?;
    match study.fitted_slope {
        Some(s) => eprintln!("fitted slope {s:.3} (1/N decay gives -1)"),
        None => eprintln!("slope undefined"),
    }
    Ok(())
}
