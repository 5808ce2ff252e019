#![allow(dead_code)]

use std::sync::{Arc, Mutex};

use shapley_effects::{Model, Result};

pub type Log = Arc<Mutex<Vec<(Vec<f64>, f64)>>>;

/// Wraps a model and records every evaluated point and value in call order.
pub struct Recording<M> {
    inner: M,
    log: Log,
}

impl<M: Model> Recording<M> {
    pub fn new(inner: M) -> (Self, Log) {
        let log = Log::default();
        (
            Self {
                inner,
                log: log.clone(),
            },
            log,
        )
    }
}

pub fn take(log: &Log) -> Vec<(Vec<f64>, f64)> {
    std::mem::take(&mut *log.lock().unwrap())
}

impl<M: Model> Model for Recording<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let v = self.inner.evaluate(x)?;
        self.log.lock().unwrap().push((x.to_vec(), v));
        Ok(v)
    }

    fn supports_concurrency(&self) -> bool {
        false
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample variance.
pub fn sample_var(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

pub fn std_err(v: &[f64]) -> f64 {
    (sample_var(v) / v.len() as f64).sqrt()
}

/// Least-squares slope, computed here independently of the library.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `sum_j phi_j` from a recorded Shapley run: each sample is `d + 1` consecutive
/// evaluations from `x` to `y`, swapping one coordinate per step.
pub fn telescoped_sigma2(log: &[(Vec<f64>, f64)], d: usize) -> f64 {
    assert_eq!(log.len() % (d + 1), 0);
    let n = log.len() / (d + 1);
    let mut total = 0.0;
    for sample in log.chunks_exact(d + 1) {
        for step in sample.windows(2) {
            let changed = step[0]
                .0
                .iter()
                .zip(&step[1].0)
                .filter(|(a, b)| a != b)
                .count();
            assert!(changed <= 1, "a walk step changed {changed} coordinates");
        }
        let (fx, fy) = (sample[0].1, sample[d].1);
        total += 0.5 * (fx - fy) * (fx - fy);
    }
    total / n as f64
}
