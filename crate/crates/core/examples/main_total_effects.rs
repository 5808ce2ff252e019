//! Pick-freeze main and total effects next to Shapley effects. Each Shapley
//! effect lies between the main and the total effect of its variable.
//!
//! cargo run --release --example main_total_effects -- [N] [SEED]

use shapley_effects::{
    estimate_main_effects, estimate_shapley_all, estimate_total_effects, ishigami_exact,
    EstimatorConfig, Ishigami, ModelFunction,
};

fn main() -> shapley_effects::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(1 << 15) as usize;
    let seed = args.next().unwrap_or(11);

    let model = Ishigami::default();
    let exact = ishigami_exact(&model);
    let f = ModelFunction::new(model);
    let space = Ishigami::input_space();
    let cfg = EstimatorConfig::new(n, seed);

    let main = estimate_main_effects(&f, &space, &cfg)?;
    let total = estimate_total_effects(&f, &space, &cfg)?;
    let shapley = estimate_shapley_all(&f, &space, &cfg)?;

    println!(
        "{:>4} {:>16} {:>16} {:>16}",
        "var", "main", "shapley", "total"
    );
    for j in 0..3 {
        println!(
            "{:>4} {:>7.3} ({:>6.3}) {:>7.3} ({:>6.3}) {:>7.3} ({:>6.3})",
            j + 1,
            main.values[j],
            exact.main[j],
            shapley.estimates[j],
            exact.shapley[j],
            total.values[j],
            exact.total[j]
        );
    }
    println!("exact values in parentheses");
    println!(
        "evaluations: main {}, total {}, shapley {}",
        main.eval_count, total.eval_count, shapley.eval_count
    );
    Ok(())
}
