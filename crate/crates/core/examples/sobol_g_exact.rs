//! Exact main, total and Shapley effects of the Sobol' g function.
//!
//! cargo run --example sobol_g_exact -- [D]

use shapley_effects::{sobol_g_exact, SobolG};

fn main() -> shapley_effects::Result<()> {
    let d = std::env::args()
        .nth(1)
        .map_or(10, |a| a.parse().expect("dimension"));
    let g = SobolG::ascending(d)?;
    let ex = sobol_g_exact(&g)?;
    println!("Sobol' g, d = {d}, a_j = j - 1, sigma2 = {:.6}", ex.sigma2);
    println!(
        "{:>4} {:>6} {:>10} {:>10} {:>10}",
        "var", "a", "main", "shapley", "total"
    );
    for j in 0..d {
        println!(
            "{:>4} {:>6} {:>10.6} {:>10.6} {:>10.6}",
            j + 1,
            g.weights()[j],
            ex.main[j],
            ex.shapley[j],
            ex.total[j]
        );
    }
    let sum: f64 = ex.shapley.iter().sum();
    println!(
        "sum of Shapley effects = {sum:.12} (sigma2 = {:.12})",
        ex.sigma2
    );
    Ok(())
}
