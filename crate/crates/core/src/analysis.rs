//! Error metrics and convergence studies over repeated seeded trials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    estimate_main_effects, estimate_shapley_all, estimate_shapley_winding, estimate_total_effects,
    EstimatorConfig,
};
use crate::input::InputSpace;
use crate::models::ModelFunction;
use crate::numeric::{ols_slope, splitmix64};

/// Which quantity an estimator targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Shapley,
    ShapleyWinding,
    Main,
    Total,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Shapley => "shapley",
            Self::ShapleyWinding => "shapley-winding",
            Self::Main => "main",
            Self::Total => "total",
        }
    }

    /// Runs the estimator once and returns its per-variable values.
    pub fn estimate(
        &self,
        f: &ModelFunction,
        space: &InputSpace,
        cfg: &EstimatorConfig,
    ) -> Result<Vec<f64>> {
        Ok(match self {
            Self::Shapley => estimate_shapley_all(f, space, cfg)?.estimates,
            Self::ShapleyWinding => estimate_shapley_winding(f, space, cfg, false)?.estimates,
            Self::Main => estimate_main_effects(f, space, cfg)?.values,
            Self::Total => estimate_total_effects(f, space, cfg)?.values,
        })
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sum_j (estimate_j - exact_j)^2`.
pub fn sse_exact(estimates: &[f64], exact: &[f64]) -> Result<f64> {
    if estimates.len() != exact.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            actual: estimates.len(),
        });
    }
    Ok(estimates
        .iter()
        .zip(exact)
        .map(|(e, x)| (e - x) * (e - x))
        .sum())
}

/// Per-trial squared deviations from the across-trial mean of each variable.
///
/// Row `r` of the result is `sum_j (phi_j^(r) - mean_j)^2`; their sum divided
/// by `R - 1` is [`sse_samplemean`].
pub fn samplemean_deviations(estimates: &[Vec<f64>]) -> Result<Vec<f64>> {
    let r = estimates.len();
    if r < 2 {
        return Err(Error::Parameter(format!(
            "sample-mean SSE needs at least 2 trials, got {r}"
        )));
    }
    let d = estimates[0].len();
    if let Some(row) = estimates.iter().find(|row| row.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: row.len(),
        });
    }
    let means: Vec<f64> = (0..d)
        .map(|j| estimates.iter().map(|row| row[j]).sum::<f64>() / r as f64)
        .collect();
    Ok(estimates
        .iter()
        .map(|row| sse_exact(row, &means).expect("equal lengths"))
        .collect())
}

/// `1/(R-1) sum_r sum_j (phi_j^(r) - mean_j)^2` over an `R x d` table of estimates.
pub fn sse_samplemean(estimates: &[Vec<f64>]) -> Result<f64> {
    let dev = samplemean_deviations(estimates)?;
    Ok(dev.iter().sum::<f64>() / (dev.len() - 1) as f64)
}

/// Seed of trial `trial` at sample size `n`: `base ^ hash(n, trial)`.
pub fn trial_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    base_seed ^ splitmix64(splitmix64(n as u64) ^ trial as u64)
}

/// How the per-N error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SseMetric {
    /// Mean over trials of the squared error against known exact values.
    Exact,
    /// Spread of the trials around their own mean, divided by `R - 1`.
    SampleMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kind: EstimatorKind,
    /// Ascending sample sizes.
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub workers: usize,
    /// Exact values of the target indices; selects [`SseMetric::Exact`] when present.
    pub reference: Option<Vec<f64>>,
}

/// Squared errors of `trials` independent runs at each sample size, with a
/// least-squares fit of `log2(mean SSE)` against `log2 N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub model: String,
    pub estimator: EstimatorKind,
    pub metric: SseMetric,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    /// `sse[i][r]`: trial `r` at `sample_sizes[i]`.
    pub sse: Vec<Vec<f64>>,
    pub mean_sse: Vec<f64>,
    /// `None` when the fit is undefined (e.g. an SSE of exactly zero).
    pub fitted_slope: Option<f64>,
}

pub fn convergence_study(
    model: &str,
    f: &ModelFunction,
    space: &InputSpace,
    cfg: &StudyConfig,
) -> Result<ConvergenceStudy> {
    if cfg.sample_sizes.is_empty() {
        return Err(Error::Parameter("no sample sizes given".into()));
    }
    if cfg.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(
            "sample sizes must be strictly ascending".into(),
        ));
    }
    if cfg.trials < 2 {
        return Err(Error::Parameter(format!(
            "convergence studies need at least 2 trials, got {}",
            cfg.trials
        )));
    }
    if let Some(exact) = &cfg.reference {
        if exact.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: exact.len(),
            });
        }
    }

    let mut sse = Vec::with_capacity(cfg.sample_sizes.len());
    let mut mean_sse = Vec::with_capacity(cfg.sample_sizes.len());
    for &n in &cfg.sample_sizes {
        let runs = (0..cfg.trials)
            .map(|r| {
                let ecfg = EstimatorConfig::new(n, trial_seed(cfg.base_seed, n, r))
                    .with_workers(cfg.workers);
                cfg.kind
                    .estimate(f, space, &ecfg)
                    .map_err(|e| Error::Trial {
                        n,
                        trial: r + 1,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let (row, mean) = match &cfg.reference {
            Some(exact) => {
                let row = runs
                    .iter()
                    .map(|est| sse_exact(est, exact))
                    .collect::<Result<Vec<_>>>()?;
                let mean = row.iter().sum::<f64>() / row.len() as f64;
                (row, mean)
            }
            None => {
                let row = samplemean_deviations(&runs)?;
                let mean = row.iter().sum::<f64>() / (row.len() - 1) as f64;
                (row, mean)
            }
        };
        sse.push(row);
        mean_sse.push(mean);
    }

    let fitted_slope = if mean_sse.iter().all(|&m| m > 0.0 && m.is_finite()) {
        let x: Vec<f64> = cfg
            .sample_sizes
            .iter()
            .map(|&n| (n as f64).log2())
            .collect();
        let y: Vec<f64> = mean_sse.iter().map(|m| m.log2()).collect();
        ols_slope(&x, &y)
    } else {
        None
    };

    Ok(ConvergenceStudy {
        model: model.to_string(),
        estimator: cfg.kind,
        metric: if cfg.reference.is_some() {
            SseMetric::Exact
        } else {
            SseMetric::SampleMean
        },
        sample_sizes: cfg.sample_sizes.clone(),
        trials: cfg.trials,
        sse,
        mean_sse,
        fitted_slope,
    })
}

impl ConvergenceStudy {
    /// Writes the study as CSV: one `model,estimator,N,trial,sse` row per trial,
    /// then `#summary,N,mean_sse` rows, then `#slope,<value|na>`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "model,estimator,N,trial,sse")?;
        for (n, row) in self.sample_sizes.iter().zip(&self.sse) {
            for (r, v) in row.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{:?}",
                    self.model,
                    self.estimator,
                    n,
                    r + 1,
                    v
                )?;
            }
        }
        for (n, m) in self.sample_sizes.iter().zip(&self.mean_sse) {
            writeln!(out, "#summary,{n},{m:?}")?;
        }
        match self.fitted_slope {
            Some(s) => writeln!(out, "#slope,{s:?}"),
            None => writeln!(out, "#slope,na"),
        }
    }
}
