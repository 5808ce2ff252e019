//! Winding-stairs Shapley estimation against the independent-pairs estimator
//! at the same sample size.
//!
//! cargo run --release --example winding_stairs -- [N] [SEED]

use shapley_effects::{
    estimate_shapley_all, estimate_shapley_winding, sobol_g_exact, EstimatorConfig, ModelFunction,
    SobolG,
};

fn main() -> shapley_effects::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(1 << 13) as usize;
    let seed = args.next().unwrap_or(7);

    let g = SobolG::ascending(5)?;
    let exact = sobol_g_exact(&g)?;
    let space = g.input_space();
    let f = ModelFunction::new(g);
    let cfg = EstimatorConfig::new(n, seed);

    let pairs = estimate_shapley_all(&f, &space, &cfg)?;
    let open = estimate_shapley_winding(&f, &space, &cfg, false)?;
    let cyclic = estimate_shapley_winding(&f, &space, &cfg, true)?;

    println!(
        "evaluations: pairs {}, winding {}, cyclic {}",
        pairs.eval_count, open.eval_count, cyclic.eval_count
    );
    println!(
        "{:>4} {:>10} {:>10} {:>10} {:>10}",
        "var", "exact", "pairs", "winding", "cyclic"
    );
    for j in 0..pairs.d {
        println!(
            "{:>4} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            j + 1,
            exact.shapley[j],
            pairs.estimates[j],
            open.estimates[j],
            cyclic.estimates[j]
        );
    }
    Ok(())
}
