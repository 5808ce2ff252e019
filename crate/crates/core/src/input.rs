//! Independent input distributions, seeded random streams, and sampling.
//!
//! An [`InputSpace`] is the product of independent one-dimensional
//! marginals. All randomness flows through [`RngStream`], a ChaCha8 generator
//! addressed by `(seed, stream_id)`: two streams with the same address yield
//! the same sequence, and distinct stream ids are independent. Estimators use
//! one stream per fixed-size chunk of samples, which is what makes parallel
//! runs reproducible regardless of the worker count.

use rand::distr::{Distribution, Open01};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// One-dimensional marginal distribution of an input variable.
///
/// Normal marginals store their standard deviation; log-normal marginals
/// store the mean and coefficient of variation of the variable itself and
/// derive the underlying normal parameters by moment matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalDistribution {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    LogNormal { mean: f64, cv: f64 },
}

impl MarginalDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Parameter(format!(
                "uniform requires finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self::Uniform { lo, hi })
    }

    /// Normal marginal from its mean and standard deviation.
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
            return Err(Error::Parameter(format!(
                "normal requires finite mean and sd >= 0, got mean={mean}, sd={sd}"
            )));
        }
        Ok(Self::Normal { mean, sd })
    }

    /// Normal marginal from its mean and coefficient of variation, `sd = |mean| * cv`.
    pub fn normal_cv(mean: f64, cv: f64) -> Result<Self> {
        if !cv.is_finite() || cv < 0.0 {
            return Err(Error::Parameter(format!(
                "normal requires cv >= 0, got {cv}"
            )));
        }
        Self::normal(mean, mean.abs() * cv)
    }

    /// Log-normal marginal whose variable (not its logarithm) has the given mean and CV.
    pub fn lognormal(mean: f64, cv: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0 && cv.is_finite() && cv > 0.0) {
            return Err(Error::Parameter(format!(
                "lognormal requires mean > 0 and cv > 0, got mean={mean}, cv={cv}"
            )));
        }
        Ok(Self::LogNormal { mean, cv })
    }

    /// Re-checks the invariants; used for values built without a constructor.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Uniform { lo, hi } => Self::uniform(lo, hi).map(|_| ()),
            Self::Normal { mean, sd } => Self::normal(mean, sd).map(|_| ()),
            Self::LogNormal { mean, cv } => Self::lognormal(mean, cv).map(|_| ()),
        }
    }

    /// Parameters `(mu_ln, sigma_ln)` of the underlying normal for a log-normal
    /// marginal: `sigma_ln^2 = ln(1 + cv^2)`, `mu_ln = ln(mean) - sigma_ln^2 / 2`.
    pub fn lognormal_underlying(mean: f64, cv: f64) -> (f64, f64) {
        let var_ln = cv.mul_add(cv, 1.0).ln();
        (mean.ln() - 0.5 * var_ln, var_ln.sqrt())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Normal { mean, .. } | Self::LogNormal { mean, .. } => mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Self::Normal { sd, .. } => sd * sd,
            Self::LogNormal { mean, cv } => (mean * cv) * (mean * cv),
        }
    }

    /// Closed support interval, or `None` when the support is unbounded.
    pub fn bounded_support(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Uniform { lo, hi } => Some((lo, hi)),
            _ => None,
        }
    }

    /// Probability density at `x`.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Self::Normal { mean, sd } => {
                if sd == 0.0 {
                    return if x == mean { f64::INFINITY } else { 0.0 };
                }
                standard_normal().pdf((x - mean) / sd) / sd
            }
            Self::LogNormal { mean, cv } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let (mu, sigma) = Self::lognormal_underlying(mean, cv);
                standard_normal().pdf((x.ln() - mu) / sigma) / (sigma * x)
            }
        }
    }

    /// The `u`-quantile of the marginal, for `u` strictly inside `(0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1), got {u}"
            )));
        }
        Ok(self.quantile_unchecked(u))
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => (hi - lo).mul_add(u, lo),
            Self::Normal { mean, sd } => sd.mul_add(standard_normal().inverse_cdf(u), mean),
            Self::LogNormal { mean, cv } => {
                let (mu, sigma) = Self::lognormal_underlying(mean, cv);
                sigma.mul_add(standard_normal().inverse_cdf(u), mu).exp()
            }
        }
    }

    /// Draws one value. Uniform draws land in `[lo, hi)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => {
                let u: f64 = rng.random();
                let v = (hi - lo).mul_add(u, lo);
                if v >= hi {
                    hi.next_down()
                } else {
                    v
                }
            }
            _ => {
                let u: f64 = Open01.sample(rng);
                self.quantile_unchecked(u)
            }
        }
    }
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Product of independent marginals over `d >= 1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSpace {
    marginals: Vec<MarginalDistribution>,
}

impl InputSpace {
    pub fn new(marginals: Vec<MarginalDistribution>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::Parameter(
                "input space needs at least one variable".into(),
            ));
        }
        for m in &marginals {
            m.validate()?;
        }
        Ok(Self { marginals })
    }

    /// `d` copies of the same marginal.
    pub fn iid(marginal: MarginalDistribution, d: usize) -> Result<Self> {
        Self::new(vec![marginal; d])
    }

    /// The unit hypercube `[0, 1)^d`.
    pub fn unit_cube(d: usize) -> Result<Self> {
        Self::iid(MarginalDistribution::uniform(0.0, 1.0)?, d)
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[MarginalDistribution] {
        &self.marginals
    }

    /// Fills `out` with one draw from the joint density, coordinate by coordinate.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        for (slot, m) in out.iter_mut().zip(&self.marginals) {
            *slot = m.sample(rng);
        }
    }

    pub fn sample_matrix(&self, n: usize, rng: &mut RngStream) -> Result<SampleMatrix> {
        if n == 0 {
            return Err(Error::Parameter("sample size must be at least 1".into()));
        }
        let d = self.dim();
        let mut values = vec![0.0; n * d];
        for row in values.chunks_exact_mut(d) {
            self.sample_into(rng, row);
        }
        Ok(SampleMatrix { n, d, values })
    }
}

/// `n x d` row-major matrix of i.i.d. draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl SampleMatrix {
    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(j).step_by(self.d).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// A permutation of the variable indices `0..d`.
///
/// The variables preceding position `l` form the coalition that is already
/// swapped when the variable at position `l` is visited.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Self {
            order: (0..d).collect(),
        }
    }

    /// Wraps `order` after checking it is a bijection on `0..order.len()`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Parameter(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Self { order })
    }

    /// Fisher-Yates reshuffle in place.
    pub fn shuffle<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.order.shuffle(rng);
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of `var` in the order; the coalition preceding it has this size.
    pub fn position_of(&self, var: usize) -> Option<usize> {
        self.order.iter().position(|&v| v == var)
    }

    /// Variables visited before `var`.
    pub fn predecessors(&self, var: usize) -> &[usize] {
        let pos = self.position_of(var).unwrap_or(self.order.len());
        &self.order[..pos]
    }
}

/// Uniformly random permutation of `0..d`.
pub fn random_permutation(d: usize, rng: &mut RngStream) -> Result<Permutation> {
    if d == 0 {
        return Err(Error::Parameter(
            "permutation length must be at least 1".into(),
        ));
    }
    let mut p = Permutation::identity(d);
    p.shuffle(rng);
    Ok(p)
}

/// Seeded ChaCha8 stream addressed by `(seed, stream_id)`.
///
/// Not shareable across threads; create one stream per worker item instead.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
