//! Monte Carlo estimators of Shapley, main and total effects.
//!
//! All estimators draw their samples in chunks of [`CHUNK_SIZE`]; chunk `c`
//! reads its randomness from its own [`RngStream`] and chunk results are
//! combined by a fixed-shape pairwise reduction. The output therefore depends
//! only on the seed and the sample size, never on the number of workers.
//!
//! # Simultaneous Shapley estimation
//!
//! For each sample, two independent points `x` and `y` and a uniformly random
//! permutation are drawn. Starting from `x`, coordinates are replaced by those
//! of `y` one at a time in permutation order; each step costs one evaluation
//! and credits the visited variable `j` with the increment
//!
//! ```text
//! (F - (F- + F+) / 2) (F- - F+)  =  (F - F+)^2 / 2  -  (F - F-)^2 / 2
//! ```
//!
//! where `F = f(x)`, `F-` is the value before and `F+` the value after
//! swapping `j`. The mean increment is an unbiased estimate of the Shapley
//! effect of `j`, and a full sample costs `d + 1` evaluations. Because the
//! walk ends at `y`, the increments of one sample telescope to
//! `(f(x) - f(y))^2 / 2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::input::{InputSpace, Permutation, RngStream};
use crate::models::ModelFunction;
use crate::numeric::{compensated_sum, CompensatedSum};

/// Number of samples drawn from one random stream.
pub const CHUNK_SIZE: usize = 1024;

/// Default two-sided normal quantile for 95% intervals.
pub const DEFAULT_CI_Z: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Sample size `N`, at least 2.
    pub n: usize,
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    pub workers: usize,
    /// Multiplier applied to the estimated standard error for confidence intervals.
    pub ci_z: f64,
}

impl EstimatorConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            workers: 1,
            ci_z: DEFAULT_CI_Z,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_ci_z(mut self, z: f64) -> Self {
        self.ci_z = z;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!(
                "sample size must be at least 2, got {}",
                self.n
            )));
        }
        if self.workers == 0 {
            return Err(Error::Parameter("worker count must be at least 1".into()));
        }
        if !(self.ci_z.is_finite() && self.ci_z > 0.0) {
            return Err(Error::Parameter(format!(
                "invalid CI multiplier {}",
                self.ci_z
            )));
        }
        Ok(())
    }
}

/// Shapley effect estimates for every variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapleyReport {
    pub d: usize,
    pub n: usize,
    pub estimates: Vec<f64>,
    /// Unbiased estimate of each estimator's variance; `None` for winding stairs.
    pub variance: Option<Vec<f64>>,
    pub ci_low: Option<Vec<f64>>,
    pub ci_high: Option<Vec<f64>>,
    /// Sum of the estimates, an unbiased estimate of the total variance.
    pub sigma2_estimate: f64,
    pub eval_count: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectKind {
    Main,
    Total,
}

/// Pick-freeze estimates of main or total effects.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectReport {
    pub d: usize,
    pub n: usize,
    pub kind: EffectKind,
    pub values: Vec<f64>,
    pub variance: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub eval_count: u64,
    pub seed: u64,
}

/// Increment credited to the variable swapped between `f_minus` and `f_plus`.
///
/// Equals `(f_x - f_plus)^2 / 2 - (f_x - f_minus)^2 / 2`, evaluated in product form.
pub fn pickfreeze_increment(f_x: f64, f_minus: f64, f_plus: f64) -> Result<f64> {
    if !(f_x.is_finite() && f_minus.is_finite() && f_plus.is_finite()) {
        return Err(Error::Evaluation {
            sample: 0,
            point: vec![],
            message: format!("non-finite values ({f_x}, {f_minus}, {f_plus})"),
        });
    }
    Ok(increment(f_x, f_minus, f_plus))
}

#[inline]
fn increment(f_x: f64, f_minus: f64, f_plus: f64) -> f64 {
    (f_x - 0.5 * (f_minus + f_plus)) * (f_minus - f_plus)
}

/// Count, compensated sum and centred second moment of a stream of values.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    sum: CompensatedSum,
    m2: f64,
}

impl Moments {
    /// Two-pass moments of a block of values.
    fn of<I: Iterator<Item = f64> + Clone>(values: I) -> Self {
        let mut count = 0u64;
        let mut sum = CompensatedSum::default();
        for v in values.clone() {
            sum.add(v);
            count += 1;
        }
        if count == 0 {
            return Self::default();
        }
        let mean = sum.value() / count as f64;
        let m2 = compensated_sum(values.map(|v| (v - mean) * (v - mean)));
        Self { count, sum, m2 }
    }

    fn mean(&self) -> f64 {
        self.sum.value() / self.count as f64
    }

    /// Pairwise combination of centred moments.
    fn merge(mut self, other: &Self) -> Self {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return *other;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean() - self.mean();
        self.m2 += other.m2 + delta * delta * na * nb / (na + nb);
        self.sum.merge(&other.sum);
        self.count += other.count;
        self
    }
}

fn merge_all(a: Vec<Moments>, b: &[Moments]) -> Vec<Moments> {
    a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
}

/// Pairwise reduction whose shape depends only on the number of items.
fn tree_reduce<T>(mut items: Vec<T>, merge: impl Fn(T, &T) -> T) -> Option<T> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, &b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

/// Evaluates `f`, tagging failures and non-finite outputs with the sample index.
fn evaluate(f: &ModelFunction, x: &[f64], sample: usize) -> Result<f64> {
    let v = f.eval(x).map_err(|e| e.at_sample(sample))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation {
            sample,
            point: x.to_vec(),
            message: format!("model returned {v}"),
        })
    }
}

fn check_inputs(f: &ModelFunction, space: &InputSpace, cfg: &EstimatorConfig) -> Result<()> {
    cfg.validate()?;
    if f.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: f.dim(),
        });
    }
    Ok(())
}

/// Runs `job` over the chunks of `0..n`, returning results in chunk order.
fn run_chunks<T, J>(f: &ModelFunction, n: usize, workers: usize, job: J) -> Result<Vec<T>>
where
    T: Send,
    J: Fn(usize, std::ops::Range<usize>) -> Result<T> + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    let range = |c: usize| c * CHUNK_SIZE..((c + 1) * CHUNK_SIZE).min(n);
    let workers = if f.supports_concurrency() { workers } else { 1 };
    let results: Vec<Result<T>> = if workers <= 1 || chunks == 1 {
        (0..chunks).map(|c| job(c, range(c))).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| job(c, range(c)))
                .collect()
        })
    };
    results.into_iter().collect()
}

fn finish_moments(moments: &[Moments], n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let estimates = moments.iter().map(|m| m.sum.value() / nf).collect();
    let variance = moments.iter().map(|m| m.m2 / (nf * (nf - 1.0))).collect();
    (estimates, variance)
}

fn intervals(estimates: &[f64], variance: &[f64], z: f64) -> (Vec<f64>, Vec<f64>) {
    estimates
        .iter()
        .zip(variance)
        .map(|(&e, &v)| {
            let half = z * v.sqrt();
            (e - half, e + half)
        })
        .unzip()
}

/// Per-variable moments of a chunk's increments stored row-major as `len x d`.
fn column_moments(g: &[f64], d: usize) -> Vec<Moments> {
    (0..d)
        .map(|j| Moments::of(g.iter().skip(j).step_by(d).copied()))
        .collect()
}

/// Estimates the Shapley effects of all variables at a cost of `(d + 1) N` evaluations.
pub fn estimate_shapley_all(
    f: &ModelFunction,
    space: &InputSpace,
    cfg: &EstimatorConfig,
) -> Result<ShapleyReport> {
    check_inputs(f, space, cfg)?;
    let d = space.dim();
    let start_count = f.eval_count();

    let chunks = run_chunks(f, cfg.n, cfg.workers, |c, samples| {
        let mut rng = RngStream::new(cfg.seed, c as u64);
        let (mut x, mut y, mut z) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        let mut perm = Permutation::identity(d);
        let mut g = vec![0.0; samples.len() * d];
        for (row, sample) in g.chunks_exact_mut(d).zip(samples) {
            space.sample_into(&mut rng, &mut x);
            space.sample_into(&mut rng, &mut y);
            perm.shuffle(&mut rng);

            let f_x = evaluate(f, &x, sample)?;
            let mut f_minus = f_x;
            z.copy_from_slice(&x);
            for &j in perm.order() {
                z[j] = y[j];
                let f_plus = evaluate(f, &z, sample)?;
                row[j] = increment(f_x, f_minus, f_plus);
                f_minus = f_plus;
            }
        }
        Ok(column_moments(&g, d))
    })?;

    let moments = tree_reduce(chunks, |a, b| merge_all(a, b)).expect("n >= 2");
    let (estimates, variance) = finish_moments(&moments, cfg.n);
    let (lo, hi) = intervals(&estimates, &variance, cfg.ci_z);
    Ok(ShapleyReport {
        d,
        n: cfg.n,
        sigma2_estimate: compensated_sum(estimates.iter().copied()),
        estimates,
        variance: Some(variance),
        ci_low: Some(lo),
        ci_high: Some(hi),
        eval_count: f.eval_count() - start_count,
        seed: cfg.seed,
    })
}

/// Chunk result of the winding-stairs walk: the last sample's final step
/// needs `f` at the first point of the next chunk, evaluated elsewhere.
struct WindingChunk {
    sums: Vec<CompensatedSum>,
    first_value: f64,
    pending: (usize, f64, f64, usize),
}

/// Shapley effects from a single sequence `x(1), ..., x(N+1)` with `y = x(n+1)`.
///
/// Costs `d N + 1` evaluations, or `d N` when `cyclic` closes the sequence with
/// `x(N+1) = x(1)`. No variance estimate is available because consecutive
/// samples are dependent.
pub fn estimate_shapley_winding(
    f: &ModelFunction,
    space: &InputSpace,
    cfg: &EstimatorConfig,
    cyclic: bool,
) -> Result<ShapleyReport> {
    check_inputs(f, space, cfg)?;
    let d = space.dim();
    let n = cfg.n;
    let start_count = f.eval_count();

    // point k lives at row k % CHUNK_SIZE of points stream 2 * (k / CHUNK_SIZE)
    let point = |k: usize, out: &mut [f64]| {
        let k = if cyclic && k == n { 0 } else { k };
        let mut rng = RngStream::new(cfg.seed, 2 * (k / CHUNK_SIZE) as u64);
        for _ in 0..=k % CHUNK_SIZE {
            space.sample_into(&mut rng, out);
        }
    };

    let chunks = run_chunks(f, n, cfg.workers, |c, samples| {
        let len = samples.len();
        let mut points_rng = RngStream::new(cfg.seed, 2 * c as u64);
        let mut perm_rng = RngStream::new(cfg.seed, 2 * c as u64 + 1);
        let mut pts = vec![0.0; (len + 1) * d];
        let mut values = Vec::with_capacity(len);
        for (row, sample) in pts.chunks_exact_mut(d).take(len).zip(samples.clone()) {
            space.sample_into(&mut points_rng, row);
            values.push(evaluate(f, row, sample)?);
        }
        point(samples.end, &mut pts[len * d..]);

        let mut sums = vec![CompensatedSum::default(); d];
        let mut perm = Permutation::identity(d);
        let mut z = vec![0.0; d];
        let mut pending = (0, 0.0, 0.0, 0);
        for (s, sample) in samples.enumerate() {
            perm.shuffle(&mut perm_rng);
            let x = &pts[s * d..(s + 1) * d];
            let y = &pts[(s + 1) * d..(s + 2) * d];
            let f_x = values[s];
            let mut f_minus = f_x;
            z.copy_from_slice(x);
            let (last, steps) = perm.order().split_last().expect("d >= 1");
            for &j in steps {
                z[j] = y[j];
                let f_plus = evaluate(f, &z, sample)?;
                sums[j].add(increment(f_x, f_minus, f_plus));
                f_minus = f_plus;
            }
            if s + 1 < len {
                sums[*last].add(increment(f_x, f_minus, values[s + 1]));
            } else {
                pending = (*last, f_x, f_minus, sample);
            }
        }
        Ok(WindingChunk {
            sums,
            first_value: values[0],
            pending,
        })
    })?;

    let closing_value = if cyclic {
        chunks[0].first_value
    } else {
        let mut x_end = vec![0.0; d];
        point(n, &mut x_end);
        evaluate(f, &x_end, n)?
    };
    let per_chunk: Vec<Vec<CompensatedSum>> = chunks
        .iter()
        .enumerate()
        .map(|(c, chunk)| {
            let next = chunks.get(c + 1).map_or(closing_value, |nx| nx.first_value);
            let (j, f_x, f_minus, _) = chunk.pending;
            let mut sums = chunk.sums.clone();
            sums[j].add(increment(f_x, f_minus, next));
            sums
        })
        .collect();
    let sums = tree_reduce(per_chunk, |mut a, b| {
        a.iter_mut().zip(b).for_each(|(x, y)| x.merge(y));
        a
    })
    .expect("n >= 2");

    let estimates: Vec<f64> = sums.iter().map(|s| s.value() / n as f64).collect();
    Ok(ShapleyReport {
        d,
        n,
        sigma2_estimate: compensated_sum(estimates.iter().copied()),
        estimates,
        variance: None,
        ci_low: None,
        ci_high: None,
        eval_count: f.eval_count() - start_count,
        seed: cfg.seed,
    })
}

fn effect_report(
    kind: EffectKind,
    moments: Vec<Vec<Moments>>,
    d: usize,
    cfg: &EstimatorConfig,
    eval_count: u64,
) -> EffectReport {
    let moments = tree_reduce(moments, |a, b| merge_all(a, b)).expect("n >= 2");
    let (values, variance) = finish_moments(&moments, cfg.n);
    let (ci_low, ci_high) = intervals(&values, &variance, cfg.ci_z);
    EffectReport {
        d,
        n: cfg.n,
        kind,
        values,
        variance,
        ci_low,
        ci_high,
        eval_count,
        seed: cfg.seed,
    }
}

/// Main (first-order) effects from `f(x) f(x_j, y_-j) - f(x) f(y)`, costing `(d + 2) N`.
pub fn estimate_main_effects(
    f: &ModelFunction,
    space: &InputSpace,
    cfg: &EstimatorConfig,
) -> Result<EffectReport> {
    check_inputs(f, space, cfg)?;
    let d = space.dim();
    let start_count = f.eval_count();
    let chunks = run_chunks(f, cfg.n, cfg.workers, |c, samples| {
        let mut rng = RngStream::new(cfg.seed, c as u64);
        let (mut x, mut y, mut z) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        let mut g = vec![0.0; samples.len() * d];
        for (row, sample) in g.chunks_exact_mut(d).zip(samples) {
            space.sample_into(&mut rng, &mut x);
            space.sample_into(&mut rng, &mut y);
            let f_x = evaluate(f, &x, sample)?;
            let f_y = evaluate(f, &y, sample)?;
            let base = f_x * f_y;
            for j in 0..d {
                z.copy_from_slice(&y);
                z[j] = x[j];
                row[j] = f_x * evaluate(f, &z, sample)? - base;
            }
        }
        Ok(column_moments(&g, d))
    })?;
    Ok(effect_report(
        EffectKind::Main,
        chunks,
        d,
        cfg,
        f.eval_count() - start_count,
    ))
}

/// Total effects from `(f(x) - f(y_j, x_-j))^2 / 2`, costing `(d + 1) N`.
pub fn estimate_total_effects(
    f: &ModelFunction,
    space: &InputSpace,
    cfg: &EstimatorConfig,
) -> Result<EffectReport> {
    check_inputs(f, space, cfg)?;
    let d = space.dim();
    let start_count = f.eval_count();
    let chunks = run_chunks(f, cfg.n, cfg.workers, |c, samples| {
        let mut rng = RngStream::new(cfg.seed, c as u64);
        let (mut x, mut y, mut z) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        let mut g = vec![0.0; samples.len() * d];
        for (row, sample) in g.chunks_exact_mut(d).zip(samples) {
            space.sample_into(&mut rng, &mut x);
            space.sample_into(&mut rng, &mut y);
            let f_x = evaluate(f, &x, sample)?;
            z.copy_from_slice(&x);
            for j in 0..d {
                z[j] = y[j];
                let diff = f_x - evaluate(f, &z, sample)?;
                row[j] = 0.5 * diff * diff;
                z[j] = x[j];
            }
        }
        Ok(column_moments(&g, d))
    })?;
    Ok(effect_report(
        EffectKind::Total,
        chunks,
        d,
        cfg,
        f.eval_count() - start_count,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::MarginalDistribution;
    use crate::models::{Constant, Ishigami};
    use crate::reference::ishigami_exact;

    #[test]
    fn increment_forms_agree() {
        assert_eq!(pickfreeze_increment(3.0, 3.0, 3.0).unwrap(), 0.0);
        let g = pickfreeze_increment(1.0, 1.0, 0.0).unwrap();
        assert_eq!(g, 0.5);
        assert_eq!(
            g,
            0.5 * (1.0f64 - 0.0).powi(2) - 0.5 * (1.0f64 - 1.0).powi(2)
        );
        let g = pickfreeze_increment(0.2, 0.2, 0.6).unwrap();
        assert!((g - 0.08).abs() < 1e-16);
        assert!(pickfreeze_increment(f64::NAN, 0.0, 0.0).is_err());
        assert!(pickfreeze_increment(0.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let f = ModelFunction::from_fn(2, |x| x[0]);
        let space = InputSpace::unit_cube(2).unwrap();
        assert!(estimate_shapley_all(&f, &space, &EstimatorConfig::new(1, 0)).is_err());
        assert!(
            estimate_shapley_all(&f, &space, &EstimatorConfig::new(8, 0).with_workers(0)).is_err()
        );
        assert!(
            estimate_shapley_all(&f, &space, &EstimatorConfig::new(8, 0).with_ci_z(-1.0)).is_err()
        );
        let wrong = InputSpace::unit_cube(3).unwrap();
        assert!(matches!(
            estimate_shapley_all(&f, &wrong, &EstimatorConfig::new(8, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(estimate_shapley_winding(&f, &wrong, &EstimatorConfig::new(8, 0), false).is_err());
        assert!(estimate_main_effects(&f, &wrong, &EstimatorConfig::new(8, 0)).is_err());
        assert!(estimate_total_effects(&f, &wrong, &EstimatorConfig::new(8, 0)).is_err());
    }

    #[test]
    fn constant_model_gives_exact_zeros() {
        let space = InputSpace::unit_cube(4).unwrap();
        let f = ModelFunction::new(Constant {
            dim: 4,
            value: 2.75,
        });
        let cfg = EstimatorConfig::new(3000, 9);
        let r = estimate_shapley_all(&f, &space, &cfg).unwrap();
        assert!(r.estimates.iter().all(|&e| e == 0.0));
        assert!(r.variance.as_ref().unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(r.sigma2_estimate, 0.0);
        let w = estimate_shapley_winding(&f, &space, &cfg, false).unwrap();
        assert!(w.estimates.iter().all(|&e| e == 0.0));
        assert_eq!(w.eval_count, 4 * 3000 + 1);
        let m = estimate_main_effects(&f, &space, &cfg).unwrap();
        assert!(m.values.iter().chain(&m.variance).all(|&v| v == 0.0));
        let t = estimate_total_effects(&f, &space, &cfg).unwrap();
        assert!(t.values.iter().chain(&t.variance).all(|&v| v == 0.0));
    }

    #[test]
    fn cost_contracts() {
        for d in [1, 3, 10] {
            let space = InputSpace::unit_cube(d).unwrap();
            let f = ModelFunction::from_fn(d, |x| x.iter().sum());
            for n in [2, 100, 2500] {
                let cfg = EstimatorConfig::new(n, 1);
                assert_eq!(
                    estimate_shapley_all(&f, &space, &cfg).unwrap().eval_count,
                    ((d + 1) * n) as u64
                );
                assert_eq!(
                    estimate_shapley_winding(&f, &space, &cfg, false)
                        .unwrap()
                        .eval_count,
                    (d * n + 1) as u64
                );
                assert_eq!(
                    estimate_shapley_winding(&f, &space, &cfg, true)
                        .unwrap()
                        .eval_count,
                    (d * n) as u64
                );
                assert_eq!(
                    estimate_total_effects(&f, &space, &cfg).unwrap().eval_count,
                    ((d + 1) * n) as u64
                );
                assert_eq!(
                    estimate_main_effects(&f, &space, &cfg).unwrap().eval_count,
                    ((d + 2) * n) as u64
                );
            }
        }
    }

    #[test]
    fn absent_coordinates_get_exact_zeros() {
        let space = InputSpace::unit_cube(2).unwrap();
        let f = ModelFunction::from_fn(2, |x| x[1]);
        let cfg = EstimatorConfig::new(5000, 4);
        let t = estimate_total_effects(&f, &space, &cfg).unwrap();
        assert_eq!((t.values[0], t.variance[0]), (0.0, 0.0));
        assert!((t.values[1] - 1.0 / 12.0).abs() < 4.0 * t.variance[1].sqrt());
        let m = estimate_main_effects(&f, &space, &cfg).unwrap();
        assert_eq!((m.values[0], m.variance[0]), (0.0, 0.0));
        let s = estimate_shapley_all(&f, &space, &cfg).unwrap();
        assert_eq!(s.estimates[0], 0.0);
        assert_eq!(s.variance.unwrap()[0], 0.0);
        let w = estimate_shapley_winding(&f, &space, &cfg, true).unwrap();
        assert_eq!(w.estimates[0], 0.0);
    }

    #[test]
    fn additive_function_shapley_within_interval() {
        let space = InputSpace::unit_cube(2).unwrap();
        let f = ModelFunction::from_fn(2, |x| x[0] + x[1]);
        let r = estimate_shapley_all(&f, &space, &EstimatorConfig::new(1 << 16, 5)).unwrap();
        let (lo, hi) = (r.ci_low.unwrap(), r.ci_high.unwrap());
        for j in 0..2 {
            assert!((r.estimates[j] - 1.0 / 12.0).abs() < 0.003);
            assert!(lo[j] <= r.estimates[j] && r.estimates[j] <= hi[j]);
        }
    }

    #[test]
    fn additive_function_interval_coverage() {
        let space = InputSpace::unit_cube(2).unwrap();
        let f = ModelFunction::from_fn(2, |x| x[0] + x[1]);
        let runs = 200;
        let mut covered = [0usize; 2];
        for seed in 0..runs {
            let r = estimate_shapley_all(&f, &space, &EstimatorConfig::new(1 << 12, seed)).unwrap();
            let (lo, hi) = (r.ci_low.unwrap(), r.ci_high.unwrap());
            for j in 0..2 {
                if lo[j] <= 1.0 / 12.0 && 1.0 / 12.0 <= hi[j] {
                    covered[j] += 1;
                }
            }
        }
        for c in covered {
            let rate = c as f64 / runs as f64;
            // binomial sd at 200 runs is ~0.015
            assert!((rate - 0.95).abs() < 0.05, "coverage {rate}");
        }
    }

    #[test]
    fn ishigami_single_run_covers_exact_values() {
        let f = ModelFunction::new(Ishigami::default());
        let cfg = EstimatorConfig::new(1 << 14, 2024);
        let r = estimate_shapley_all(&f, &Ishigami::input_space(), &cfg).unwrap();
        let ex = ishigami_exact(&Ishigami::default());
        let (lo, hi) = (r.ci_low.unwrap(), r.ci_high.unwrap());
        for j in 0..3 {
            assert!(lo[j] <= ex.shapley[j] && ex.shapley[j] <= hi[j], "j = {j}");
        }
    }

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn winding_single_variable() {
        let space = InputSpace::unit_cube(1).unwrap();
        let f = ModelFunction::from_fn(1, |x| x[0]);
        let estimates: Vec<f64> = (0..30)
            .map(|s| {
                estimate_shapley_winding(&f, &space, &EstimatorConfig::new(1 << 16, s), false)
                    .unwrap()
                    .estimates[0]
            })
            .collect();
        let (mean, se) = mean_and_se(&estimates);
        assert!((mean - 1.0 / 12.0).abs() < 3.0 * se, "{mean} +- {se}");
    }

    #[test]
    fn winding_ishigami_total_variance() {
        let f = ModelFunction::new(Ishigami::default());
        let sums: Vec<f64> = (0..10)
            .map(|s| {
                estimate_shapley_winding(
                    &f,
                    &Ishigami::input_space(),
                    &EstimatorConfig::new(1 << 14, s),
                    false,
                )
                .unwrap()
                .sigma2_estimate
            })
            .collect();
        let (mean, se) = mean_and_se(&sums);
        assert!((mean - 13.8445).abs() < 3.0 * se, "{mean} +- {se}");
    }

    #[test]
    fn main_and_total_effects_on_ishigami() {
        let f = ModelFunction::new(Ishigami::default());
        let ex = ishigami_exact(&Ishigami::default());
        let space = Ishigami::input_space();
        let mut mains = vec![vec![]; 3];
        let mut totals = vec![vec![]; 3];
        for s in 0..10 {
            let cfg = EstimatorConfig::new(1 << 16, s);
            let m = estimate_main_effects(&f, &space, &cfg).unwrap();
            let t = estimate_total_effects(&f, &space, &cfg).unwrap();
            for j in 0..3 {
                mains[j].push(m.values[j]);
                totals[j].push(t.values[j]);
                assert!(t.values[j] >= 0.0);
            }
        }
        for j in 0..3 {
            let (m, se) = mean_and_se(&mains[j]);
            assert!((m - ex.main[j]).abs() < 3.0 * se, "main {j}: {m} +- {se}");
            let (t, se) = mean_and_se(&totals[j]);
            assert!((t - ex.total[j]).abs() < 3.0 * se, "total {j}: {t} +- {se}");
        }
    }

    #[test]
    fn single_variable_main_effect() {
        let space = InputSpace::unit_cube(2).unwrap();
        let f = ModelFunction::from_fn(2, |x| x[0]);
        let m = estimate_main_effects(&f, &space, &EstimatorConfig::new(1 << 16, 8)).unwrap();
        assert!((m.values[0] - 1.0 / 12.0).abs() < 4.0 * m.variance[0].sqrt());
        assert_eq!(m.values[1], 0.0);
    }

    #[test]
    fn evaluation_failures_name_the_sample() {
        let space = InputSpace::new(vec![MarginalDistribution::normal(0.0, 1.0).unwrap()]).unwrap();
        let f = ModelFunction::from_fn(1, |x| if x[0] > 2.5 { f64::NAN } else { x[0] });
        match estimate_shapley_all(&f, &space, &EstimatorConfig::new(4000, 0)) {
            Err(Error::Evaluation { sample, point, .. }) => {
                assert!(sample < 4000);
                assert!(point[0] > 2.5);
            }
            other => panic!("expected evaluation error, got {other:?}"),
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let f = ModelFunction::new(Ishigami::default());
        let space = Ishigami::input_space();
        let cfg = EstimatorConfig::new(5000, 77);
        let a = estimate_shapley_all(&f, &space, &cfg).unwrap();
        let b = estimate_shapley_all(&f, &space, &cfg.with_workers(3)).unwrap();
        assert_eq!(a, b);
        let a = estimate_shapley_winding(&f, &space, &cfg, false).unwrap();
        let b = estimate_shapley_winding(&f, &space, &cfg.with_workers(4), false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn moments_merge_matches_direct_computation() {
        let xs: Vec<f64> = (0..1000)
            .map(|i| ((i * 37) % 101) as f64 * 0.37 + 1e6)
            .collect();
        let direct = Moments::of(xs.iter().copied());
        let parts: Vec<Moments> = xs
            .chunks(97)
            .map(|c| Moments::of(c.iter().copied()))
            .collect();
        let merged = tree_reduce(parts, |a, b| a.merge(b)).unwrap();
        assert_eq!(merged.count, 1000);
        assert!((merged.mean() - direct.mean()).abs() < 1e-9);
        assert!((merged.m2 - direct.m2).abs() < 1e-9 * direct.m2);
    }
}
