//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use shapley_effects::analysis::{sse_exact, SseMetric};
use shapley_effects::{
    anova_oracle, convergence_study, estimate_main_effects, estimate_shapley_all,
    estimate_shapley_winding, estimate_total_effects, ishigami_exact, shapley_from_anova,
    sobol_g_exact, AnovaDecomposition, Constant, EstimatorConfig, EstimatorKind, InputSpace,
    Ishigami, Model, ModelFunction, PlateBuckling, QuadratureRule, SobolG, StudyConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

/// Closed-form Sobol' g subset variance, written out here as a product.
fn g_subset_variance(a: &[f64], mask: usize) -> f64 {
    (0..a.len())
        .filter(|j| mask >> j & 1 == 1)
        .map(|j| 1.0 / (3.0 * (1.0 + a[j]).powi(2)))
        .product()
}

fn ascending(d: usize) -> Vec<f64> {
    (0..d).map(|j| j as f64).collect()
}

fn exact_identities() -> Outcome {
    let tol = 1e-12;
    let mut cases = vec![("ishigami".to_string(), ishigami_exact(&Ishigami::default()))];
    for d in 1..=12 {
        cases.push((
            format!("sobol-g d={d}"),
            sobol_g_exact(&SobolG::ascending(d).unwrap()).unwrap(),
        ));
    }
    let mut worst: f64 = 0.0;
    for (name, ex) in &cases {
        let sum: f64 = ex.shapley.iter().sum();
        let r = rel_err(sum, ex.sigma2);
        worst = worst.max(r);
        ensure!(r <= tol, "{name}: sum(phi) = {sum}, sigma2 = {}", ex.sigma2);
        let slack = tol * ex.sigma2;
        for j in 0..ex.dim() {
            ensure!(
                ex.main[j] <= ex.shapley[j] + slack && ex.shapley[j] <= ex.total[j] + slack,
                "{name}: ordering fails at variable {}",
                j + 1
            );
        }
    }
    Ok(format!(
        "{} models, worst relative gap {worst:.1e}",
        cases.len()
    ))
}

fn cross_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 1..=12 {
        let a = ascending(d);
        let variances: Vec<f64> = (0..1usize << d)
            .map(|m| {
                if m == 0 {
                    0.0
                } else {
                    g_subset_variance(&a, m)
                }
            })
            .collect();
        let anova = AnovaDecomposition::new(d, 1.0, variances).unwrap();
        let phi = shapley_from_anova(&anova);
        let ex = sobol_g_exact(&SobolG::ascending(d).unwrap()).unwrap();
        for (j, (p, e)) in phi.iter().zip(&ex.shapley).enumerate() {
            let r = rel_err(*p, *e);
            worst = worst.max(r);
            ensure!(r <= 1e-12, "d={d}, phi_{}: {p} vs {e}", j + 1);
        }
    }
    let a = ascending(3);
    let g = SobolG::new(a.clone()).unwrap();
    let space = g.input_space();
    let oracle = anova_oracle(
        &ModelFunction::new(g),
        &space,
        QuadratureRule::composite(8, 32),
        &[],
    )
    .unwrap();
    let mut worst_abs: f64 = 0.0;
    for mask in 1..8usize {
        let err = (oracle.variance(mask as u32) - g_subset_variance(&a, mask)).abs();
        worst_abs = worst_abs.max(err);
        ensure!(
            err <= 1e-6,
            "oracle sigma2_u for mask {mask:03b} off by {err:e}"
        );
    }
    Ok(format!(
        "Owen identity rel {worst:.1e}; quadrature oracle abs {worst_abs:.1e} at 256 nodes/axis"
    ))
}

fn ishigami_estimation() -> Outcome {
    let exact = ishigami_exact(&Ishigami::default());
    for (j, rounded) in [6.0327, 6.125, 1.6869].iter().enumerate() {
        ensure!(
            (exact.shapley[j] - rounded).abs() < 1e-4,
            "closed form phi_{} = {}",
            j + 1,
            exact.shapley[j]
        );
    }
    let f = ModelFunction::new(Ishigami::default());
    let space = Ishigami::input_space();
    let r = estimate_shapley_all(&f, &space, &EstimatorConfig::new(1 << 14, 0)).unwrap();
    let (lo, hi) = (r.ci_low.unwrap(), r.ci_high.unwrap());
    for j in 0..3 {
        ensure!(
            lo[j] <= exact.shapley[j] && exact.shapley[j] <= hi[j],
            "N=2^14: phi_{} = {} outside [{}, {}]",
            j + 1,
            exact.shapley[j],
            lo[j],
            hi[j]
        );
    }
    let seeds = 500;
    let mut covered = [0usize; 3];
    for s in 0..seeds {
        let r =
            estimate_shapley_all(&f, &space, &EstimatorConfig::new(1 << 12, 10_000 + s)).unwrap();
        let (lo, hi) = (r.ci_low.unwrap(), r.ci_high.unwrap());
        for j in 0..3 {
            covered[j] += usize::from(lo[j] <= exact.shapley[j] && exact.shapley[j] <= hi[j]);
        }
    }
    let rates: Vec<f64> = covered.iter().map(|&c| c as f64 / seeds as f64).collect();
    for (j, rate) in rates.iter().enumerate() {
        ensure!(
            (rate - 0.95).abs() <= 0.04,
            "coverage of phi_{} is {rate}",
            j + 1
        );
    }
    Ok(format!(
        "exact values inside CI at N=2^14; coverage {rates:?} over {seeds} seeds"
    ))
}

fn rate_reproduction() -> Outcome {
    let ns: Vec<usize> = (8..=14).map(|k| 1 << k).collect();
    let study = |name: &str, f: ModelFunction, space: InputSpace, reference: Option<Vec<f64>>| {
        let cfg = StudyConfig {
            kind: EstimatorKind::Shapley,
            sample_sizes: ns.clone(),
            trials: 10,
            base_seed: 2024,
            workers: 4,
            reference,
        };
        convergence_study(name, &f, &space, &cfg).unwrap()
    };
    let g = SobolG::ascending(10).unwrap();
    let studies = [
        study(
            "ishigami",
            ModelFunction::new(Ishigami::default()),
            Ishigami::input_space(),
            Some(ishigami_exact(&Ishigami::default()).shapley),
        ),
        study(
            "sobol-g",
            ModelFunction::new(g.clone()),
            g.input_space(),
            Some(sobol_g_exact(&g).unwrap().shapley),
        ),
        study(
            "plate-buckling",
            ModelFunction::new(PlateBuckling),
            PlateBuckling::input_space(),
            None,
        ),
    ];
    ensure!(
        studies[2].metric == SseMetric::SampleMean,
        "plate buckling should use the sample-mean SSE"
    );
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    let mut slopes = Vec::new();
    for s in &studies {
        let y: Vec<f64> = s.mean_sse.iter().map(|v| v.log2()).collect();
        let own = slope(&x, &y);
        let fitted = s.fitted_slope.ok_or(format!("{}: no slope", s.model))?;
        ensure!(
            (own - fitted).abs() < 1e-12,
            "{}: fitted {fitted} vs recomputed {own}",
            s.model
        );
        ensure!((fitted + 1.0).abs() <= 0.2, "{}: slope {fitted}", s.model);
        slopes.push(format!("{} {fitted:.3}", s.model));
    }
    Ok(slopes.join(", "))
}

fn cost_contracts() -> Outcome {
    for d in [1usize, 3, 10] {
        let g = SobolG::ascending(d).unwrap();
        let space = g.input_space();
        let f = ModelFunction::new(g);
        for n in [2usize, 100] {
            let cfg = EstimatorConfig::new(n, 1);
            let checks = [
                (
                    "shapley",
                    estimate_shapley_all(&f, &space, &cfg).unwrap().eval_count,
                    (d + 1) * n,
                ),
                (
                    "winding",
                    estimate_shapley_winding(&f, &space, &cfg, false)
                        .unwrap()
                        .eval_count,
                    d * n + 1,
                ),
                (
                    "cyclic",
                    estimate_shapley_winding(&f, &space, &cfg, true)
                        .unwrap()
                        .eval_count,
                    d * n,
                ),
                (
                    "total",
                    estimate_total_effects(&f, &space, &cfg).unwrap().eval_count,
                    (d + 1) * n,
                ),
                (
                    "main",
                    estimate_main_effects(&f, &space, &cfg).unwrap().eval_count,
                    (d + 2) * n,
                ),
            ];
            for (name, got, want) in checks {
                ensure!(
                    got == want as u64,
                    "{name} d={d} N={n}: {got} evaluations, expected {want}"
                );
            }
        }
    }
    Ok("d in {1, 3, 10}, N in {2, 100}".into())
}

fn telescoping() -> Outcome {
    fn check<M: Model + 'static>(name: &str, model: M, space: InputSpace) -> Result<f64, String> {
        let d = model.dim();
        let (rec, log) = Recording::new(model);
        let f = ModelFunction::new(rec);
        let r = estimate_shapley_all(&f, &space, &EstimatorConfig::new(1 << 10, 77)).unwrap();
        let oracle = telescoped_sigma2(&take(&log), d);
        let gap = (r.sigma2_estimate - oracle).abs();
        ensure!(
            gap <= 1e-10 * oracle.abs(),
            "{name}: {} vs {oracle}",
            r.sigma2_estimate
        );
        Ok(if oracle == 0.0 { 0.0 } else { gap / oracle })
    }
    let g = SobolG::ascending(10).unwrap();
    let gs = g.input_space();
    let worst = [
        check("ishigami", Ishigami::default(), Ishigami::input_space())?,
        check("sobol-g", g, gs)?,
        check(
            "plate-buckling",
            PlateBuckling,
            PlateBuckling::input_space(),
        )?,
        check(
            "constant",
            Constant { dim: 3, value: 2.5 },
            InputSpace::unit_cube(3).unwrap(),
        )?,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(format!(
        "4 builtin models at N=2^10, worst relative gap {worst:.1e}"
    ))
}

fn unbiased_sigma2() -> Outcome {
    let sigma2 = ishigami_exact(&Ishigami::default()).sigma2;
    ensure!(
        (sigma2 - 13.8445).abs() < 1e-4,
        "closed-form sigma2 = {sigma2}"
    );
    let f = ModelFunction::new(Ishigami::default());
    let space = Ishigami::input_space();
    let s: Vec<f64> = (0..200)
        .map(|seed| {
            estimate_shapley_all(&f, &space, &EstimatorConfig::new(1 << 10, 500 + seed))
                .unwrap()
                .sigma2_estimate
        })
        .collect();
    let z = (mean(&s) - sigma2) / std_err(&s);
    ensure!(
        z.abs() <= 4.0,
        "mean {} is {z:.2} standard errors from {sigma2}",
        mean(&s)
    );
    Ok(format!("mean {:.4}, z = {z:.2}", mean(&s)))
}

fn degenerate_exactness() -> Outcome {
    let d = 4;
    let space = InputSpace::unit_cube(d).unwrap();
    let c = ModelFunction::new(Constant {
        dim: d,
        value: -3.75,
    });
    let cfg = EstimatorConfig::new(3000, 8);
    let all = estimate_shapley_all(&c, &space, &cfg).unwrap();
    ensure!(
        all.estimates
            .iter()
            .chain(all.variance.as_ref().unwrap())
            .all(|&v| v == 0.0),
        "shapley not exactly 0"
    );
    ensure!(
        all.sigma2_estimate == 0.0,
        "sigma2 estimate {}",
        all.sigma2_estimate
    );
    for cyclic in [false, true] {
        let w = estimate_shapley_winding(&c, &space, &cfg, cyclic).unwrap();
        ensure!(
            w.estimates.iter().all(|&v| v == 0.0),
            "winding not exactly 0"
        );
    }
    for r in [
        estimate_main_effects(&c, &space, &cfg).unwrap(),
        estimate_total_effects(&c, &space, &cfg).unwrap(),
    ] {
        ensure!(
            r.values.iter().chain(&r.variance).all(|&v| v == 0.0),
            "{:?} effects not exactly 0",
            r.kind
        );
    }
    for reference in [Some(vec![0.0; d]), None] {
        let study = convergence_study(
            "constant",
            &c,
            &space,
            &StudyConfig {
                kind: EstimatorKind::Shapley,
                sample_sizes: vec![4, 16, 64],
                trials: 3,
                base_seed: 1,
                workers: 1,
                reference,
            },
        )
        .unwrap();
        ensure!(
            study
                .sse
                .iter()
                .flatten()
                .chain(&study.mean_sse)
                .all(|&v| v == 0.0),
            "nonzero SSE"
        );
        ensure!(
            study.fitted_slope.is_none(),
            "slope should be not applicable"
        );
    }
    ensure!(
        sse_exact(&all.estimates, &[0.0; 4]).unwrap() == 0.0,
        "sse of zeros"
    );

    // only x1 matters: a zero mean and a zero spread mean every increment was 0
    let one = ModelFunction::from_fn(3, |x| (5.0 * x[0]).sin());
    let space3 = InputSpace::unit_cube(3).unwrap();
    let r = estimate_shapley_all(&one, &space3, &EstimatorConfig::new(5000, 4)).unwrap();
    let var = r.variance.as_ref().unwrap();
    for j in 1..3 {
        ensure!(
            r.estimates[j] == 0.0 && var[j] == 0.0,
            "absent x{} got {} (var {})",
            j + 1,
            r.estimates[j],
            var[j]
        );
    }
    ensure!(r.estimates[0] > 0.0, "x1 should carry the variance");
    Ok("constant and single-coordinate models give exact zeros".into())
}

fn determinism() -> Outcome {
    let g = SobolG::ascending(6).unwrap();
    let models = [
        (
            ModelFunction::new(Ishigami::default()),
            Ishigami::input_space(),
        ),
        (ModelFunction::new(g.clone()), g.input_space()),
        (
            ModelFunction::new(PlateBuckling),
            PlateBuckling::input_space(),
        ),
    ];
    let mut compared = 0;
    for (f, space) in &models {
        for n in [2, 1023, 5000] {
            let run = |workers: usize| {
                let cfg = EstimatorConfig::new(n, 31).with_workers(workers);
                format!(
                    "{:?}|{:?}|{:?}|{:?}|{:?}",
                    estimate_shapley_all(f, space, &cfg).unwrap(),
                    estimate_shapley_winding(f, space, &cfg, false).unwrap(),
                    estimate_shapley_winding(f, space, &cfg, true).unwrap(),
                    estimate_main_effects(f, space, &cfg).unwrap(),
                    estimate_total_effects(f, space, &cfg).unwrap(),
                )
            };
            let (a, b, c) = (run(1), run(4), run(4));
            ensure!(a == b && b == c, "reports differ at N={n}");
            compared += 5;
        }
    }
    Ok(format!(
        "{compared} report pairs identical for workers 1 and 4"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "exact-reference identities",
            exact_identities,
            Duration::from_secs(1),
        ),
        (
            "cross-oracle agreement",
            cross_oracle,
            Duration::from_secs(30),
        ),
        (
            "Ishigami estimation and coverage",
            ishigami_estimation,
            Duration::from_secs(120),
        ),
        (
            "1/N rate reproduction",
            rate_reproduction,
            Duration::from_secs(600),
        ),
        ("cost contracts", cost_contracts, Duration::from_secs(1)),
        ("telescoping identity", telescoping, Duration::from_secs(5)),
        (
            "unbiasedness of sigma2 estimate",
            unbiased_sigma2,
            Duration::from_secs(60),
        ),
        (
            "degenerate exactness",
            degenerate_exactness,
            Duration::from_secs(1),
        ),
        (
            "determinism across workers",
            determinism,
            Duration::from_secs(10),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= *budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!(
                "criterion {}: PASS  {name} ({detail}) [{elapsed:.2?}]",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({why}) [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
