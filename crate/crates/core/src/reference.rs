//! Exact sensitivity indices for the analytic test functions, the
//! Shapley-from-ANOVA identity, and a quadrature-based ANOVA oracle.
//!
//! Subsets of `0..d` are represented as bitmasks (`u32`); bit `j` set means
//! variable `j` belongs to the subset.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::input::{InputSpace, MarginalDistribution};
use crate::models::{Ishigami, ModelFunction, SobolG};
use crate::numeric::{compensated_sum, gauss_legendre, CompensatedSum};

/// Largest dimension for which subset enumeration is attempted.
pub const MAX_ENUMERATION_DIM: usize = 25;

/// Largest dimension the tensor-grid oracle accepts.
pub const MAX_ORACLE_DIM: usize = 4;

/// Main, total and Shapley effects of each variable together with the total variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityIndices {
    pub main: Vec<f64>,
    pub total: Vec<f64>,
    pub shapley: Vec<f64>,
    pub sigma2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl SensitivityIndices {
    pub fn dim(&self) -> usize {
        self.shapley.len()
    }
}

/// Variances `sigma_u^2` of the ANOVA components, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct AnovaDecomposition {
    d: usize,
    mu: f64,
    variances: Vec<f64>,
}

impl AnovaDecomposition {
    /// `variances` must have length `2^d`; entry 0 (the empty set) is ignored.
    pub fn new(d: usize, mu: f64, mut variances: Vec<f64>) -> Result<Self> {
        if d == 0 || d > MAX_ENUMERATION_DIM {
            return Err(Error::Capacity(format!(
                "ANOVA tables support 1..={MAX_ENUMERATION_DIM} variables, got {d}"
            )));
        }
        if variances.len() != 1 << d {
            return Err(Error::DimensionMismatch {
                expected: 1 << d,
                actual: variances.len(),
            });
        }
        if let Some(bad) = variances.iter().skip(1).find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::Parameter(format!(
                "component variances must be non-negative, got {bad}"
            )));
        }
        variances[0] = 0.0;
        Ok(Self { d, mu, variances })
    }

    /// Builds a table from a sparse list of `(subset, variance)` pairs.
    pub fn from_terms(d: usize, mu: f64, terms: &[(&[usize], f64)]) -> Result<Self> {
        let mut variances = vec![0.0; 1usize.checked_shl(d as u32).unwrap_or(0)];
        if variances.is_empty() || d > MAX_ENUMERATION_DIM {
            return Err(Error::Capacity(format!("cannot tabulate {d} variables")));
        }
        for (subset, v) in terms {
            let mask = subset_mask(subset, d)?;
            if mask == 0 {
                return Err(Error::Parameter("the empty set carries no variance".into()));
            }
            variances[mask as usize] += v;
        }
        Self::new(d, mu, variances)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn variance(&self, subset: u32) -> f64 {
        self.variances[subset as usize]
    }

    /// Iterator over `(subset, sigma_u^2)` for every non-empty subset.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.variances
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, &v)| (m as u32, v))
    }

    pub fn sigma2(&self) -> f64 {
        compensated_sum(self.variances.iter().skip(1).copied())
    }

    pub fn main_effect(&self, j: usize) -> f64 {
        self.variances[1 << j]
    }

    /// Sum of the variances of every subset touching `j`.
    pub fn total_effect(&self, j: usize) -> f64 {
        compensated_sum(
            self.iter()
                .filter(|(m, _)| m & (1 << j) != 0)
                .map(|(_, v)| v),
        )
    }

    pub fn indices(&self) -> SensitivityIndices {
        SensitivityIndices {
            main: (0..self.d).map(|j| self.main_effect(j)).collect(),
            total: (0..self.d).map(|j| self.total_effect(j)).collect(),
            shapley: shapley_from_anova(self),
            sigma2: self.sigma2(),
            mu: Some(self.mu),
        }
    }
}

fn subset_mask(subset: &[usize], d: usize) -> Result<u32> {
    subset.iter().try_fold(0u32, |m, &j| {
        if j >= d {
            Err(Error::Parameter(format!(
                "variable {j} out of range for d = {d}"
            )))
        } else {
            Ok(m | (1 << j))
        }
    })
}

/// Shapley effects from component variances: each `sigma_u^2` is split
/// equally among the `|u|` members of `u`.
pub fn shapley_from_anova(anova: &AnovaDecomposition) -> Vec<f64> {
    let mut acc = vec![CompensatedSum::default(); anova.d];
    for (mask, v) in anova.iter() {
        if v == 0.0 {
            continue;
        }
        let share = v / mask.count_ones() as f64;
        let mut bits = mask;
        while bits != 0 {
            acc[bits.trailing_zeros() as usize].add(share);
            bits &= bits - 1;
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// Closed-form indices of the Ishigami function under uniform inputs on `[-pi, pi]^3`.
///
/// Only `{1}`, `{2}` and `{1, 3}` carry variance; the `{1, 3}` interaction
/// is shared equally by variables 1 and 3.
pub fn ishigami_exact(params: &Ishigami) -> SensitivityIndices {
    let anova = ishigami_anova(params);
    let (m1, m2, v13) = (
        anova.variance(0b001),
        anova.variance(0b010),
        anova.variance(0b101),
    );
    SensitivityIndices {
        main: vec![m1, m2, 0.0],
        total: vec![m1 + v13, m2, v13],
        shapley: vec![m1 + 0.5 * v13, m2, 0.5 * v13],
        sigma2: m1 + m2 + v13,
        mu: Some(params.a / 2.0),
    }
}

/// The three non-zero Ishigami component variances.
pub fn ishigami_anova(params: &Ishigami) -> AnovaDecomposition {
    let (a, b) = (params.a, params.b);
    let pi4 = PI.powi(4);
    let m1 = 0.5 * (1.0 + pi4 * b / 5.0).powi(2);
    let m2 = a * a / 8.0;
    let v13 = 8.0 * pi4 * pi4 * b * b / 225.0;
    AnovaDecomposition::from_terms(3, a / 2.0, &[(&[0], m1), (&[1], m2), (&[0, 2], v13)])
        .expect("valid Ishigami terms")
}

/// `1 / (3 (1 + a_j)^2)`, the first-order variance of one Sobol' g factor.
pub fn sobol_g_factor_variance(a: f64) -> f64 {
    1.0 / (3.0 * (1.0 + a) * (1.0 + a))
}

/// Exact indices of the Sobol' g function on the unit cube.
///
/// Shapley effects are obtained by walking all `2^d` subsets depth-first, so
/// `d` is capped at [`MAX_ENUMERATION_DIM`].
pub fn sobol_g_exact(params: &SobolG) -> Result<SensitivityIndices> {
    let v: Vec<f64> = params
        .weights()
        .iter()
        .map(|&a| sobol_g_factor_variance(a))
        .collect();
    let d = v.len();
    if d > MAX_ENUMERATION_DIM {
        return Err(Error::Capacity(format!(
            "exact Shapley effects enumerate 2^d subsets; d = {d} exceeds {MAX_ENUMERATION_DIM}"
        )));
    }
    let total = (0..d)
        .map(|j| {
            v[j] * v
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != j)
                .map(|(_, vl)| 1.0 + vl)
                .product::<f64>()
        })
        .collect();
    let sigma2 = v.iter().map(|vj| 1.0 + vj).product::<f64>() - 1.0;

    let mut acc = vec![CompensatedSum::default(); d];
    let mut members = Vec::with_capacity(d);
    walk_subsets(0, 1.0, &v, &mut members, &mut acc);

    Ok(SensitivityIndices {
        main: v.clone(),
        total,
        shapley: acc.iter().map(CompensatedSum::value).collect(),
        sigma2,
        mu: Some(1.0),
    })
}

fn walk_subsets(
    i: usize,
    prod: f64,
    v: &[f64],
    members: &mut Vec<usize>,
    acc: &mut [CompensatedSum],
) {
    if i == v.len() {
        if !members.is_empty() {
            let share = prod / members.len() as f64;
            for &j in members.iter() {
                acc[j].add(share);
            }
        }
        return;
    }
    walk_subsets(i + 1, prod, v, members, acc);
    members.push(i);
    walk_subsets(i + 1, prod * v[i], v, members, acc);
    members.pop();
}

/// Closed-form Sobol' g component variances `sigma_u^2 = prod_{j in u} v_j`.
pub fn sobol_g_anova(params: &SobolG) -> Result<AnovaDecomposition> {
    let v: Vec<f64> = params
        .weights()
        .iter()
        .map(|&a| sobol_g_factor_variance(a))
        .collect();
    let d = v.len();
    if d > MAX_ENUMERATION_DIM {
        return Err(Error::Capacity(format!("cannot tabulate 2^{d} subsets")));
    }
    let mut table = vec![1.0; 1 << d];
    for mask in 1..table.len() {
        let low = mask.trailing_zeros() as usize;
        table[mask] = table[mask & (mask - 1)] * v[low];
    }
    AnovaDecomposition::new(d, 1.0, table)
}

/// Composite Gauss-Legendre rule: `panels` equal sub-intervals with `order` nodes each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    pub order: usize,
    pub panels: usize,
}

impl QuadratureRule {
    /// Single-panel Gauss-Legendre with `nodes` points.
    pub fn gauss_legendre(nodes: usize) -> Self {
        Self {
            order: nodes,
            panels: 1,
        }
    }

    pub fn composite(order: usize, panels: usize) -> Self {
        Self { order, panels }
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.order * self.panels
    }

    /// Nodes and probability weights (summing to one) for `density` on `[lo, hi]`.
    fn axis(&self, lo: f64, hi: f64, density: impl Fn(f64) -> f64) -> Result<AxisNodes> {
        if self.panels == 0 {
            return Err(Error::Parameter(
                "quadrature needs at least one panel".into(),
            ));
        }
        let (x, w) = gauss_legendre(self.order)?;
        let h = (hi - lo) / self.panels as f64;
        let mut nodes = Vec::with_capacity(self.nodes_per_axis());
        let mut weights = Vec::with_capacity(self.nodes_per_axis());
        for p in 0..self.panels {
            let a = lo + h * p as f64;
            for (xi, wi) in x.iter().zip(&w) {
                let t = a + 0.5 * h * (xi + 1.0);
                nodes.push(t);
                weights.push(0.5 * h * wi * density(t));
            }
        }
        let total = compensated_sum(weights.iter().copied());
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Parameter(format!(
                "density has no mass on [{lo}, {hi}]"
            )));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(AxisNodes { nodes, weights })
    }
}

#[derive(Debug, Clone)]
struct AxisNodes {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// ANOVA components of a function tabulated on a tensor quadrature grid.
///
/// The decomposition is exact for the discrete product measure defined by the
/// quadrature weights, and approaches the continuous one as the rule is refined.
#[derive(Debug, Clone)]
pub struct AnovaComponents {
    d: usize,
    n: usize,
    axes: Vec<AxisNodes>,
    mu: f64,
    /// `components[u]` holds `f_u` on the grid of the axes in `u`, axis order ascending,
    /// lowest axis fastest.
    components: Vec<Vec<f64>>,
}

impl AnovaComponents {
    /// Tabulates `f` on the grid and performs the recursive decomposition.
    ///
    /// `truncation[j]` bounds the integration range of marginal `j`; it is
    /// required for unbounded marginals and ignored for bounded ones.
    pub fn compute(
        f: &ModelFunction,
        space: &InputSpace,
        rule: QuadratureRule,
        truncation: &[Option<(f64, f64)>],
    ) -> Result<Self> {
        let d = space.dim();
        if f.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: f.dim(),
            });
        }
        if d > MAX_ORACLE_DIM {
            return Err(Error::Capacity(format!(
                "tensor-grid oracle supports d <= {MAX_ORACLE_DIM}, got {d}"
            )));
        }
        let axes = space
            .marginals()
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let (lo, hi) = match (m.bounded_support(), truncation.get(j).copied().flatten()) {
                    (Some(b), _) => b,
                    (None, Some(b)) => b,
                    (None, None) => {
                        return Err(Error::Unsupported(format!(
                            "marginal {} has unbounded support; supply truncation bounds",
                            j + 1
                        )))
                    }
                };
                if lo.is_nan() || hi.is_nan() || lo >= hi {
                    return Err(Error::Parameter(format!("empty truncation [{lo}, {hi}]")));
                }
                rule.axis(lo, hi, |x| density_of(m, x))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = rule.nodes_per_axis();
        let total_points = n.pow(d as u32);

        let mut values = vec![0.0; total_points];
        let mut x = vec![0.0; d];
        for (flat, slot) in values.iter_mut().enumerate() {
            let mut rem = flat;
            for (k, axis) in axes.iter().enumerate() {
                x[k] = axis.nodes[rem % n];
                rem /= n;
            }
            *slot = f.eval(&x)?;
        }

        let subsets = 1usize << d;
        // conditional expectations E[f | x_u] on the u-grid
        let mut cond: Vec<Vec<f64>> = Vec::with_capacity(subsets);
        for u in 0..subsets {
            let size = n.pow(u.count_ones());
            let mut g = vec![0.0; size];
            for (flat, &val) in values.iter().enumerate() {
                let mut rem = flat;
                let mut w = 1.0;
                let (mut idx, mut stride) = (0, 1);
                for (k, axis) in axes.iter().enumerate() {
                    let i = rem % n;
                    rem /= n;
                    if u & (1 << k) != 0 {
                        idx += i * stride;
                        stride *= n;
                    } else {
                        w *= axis.weights[i];
                    }
                }
                g[idx] += w * val;
            }
            cond.push(g);
        }
        let mu = cond[0][0];

        // inclusion-exclusion: f_u = sum_{v subset u} (-1)^{|u|-|v|} E[f | x_v]
        let mut components = vec![vec![0.0]; subsets];
        components[0] = vec![mu];
        for u in 1..subsets {
            let size = n.pow(u.count_ones());
            let mut fu = vec![0.0; size];
            let mut v = u;
            loop {
                let sign = if (u.count_ones() - v.count_ones()) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                for (idx, slot) in fu.iter_mut().enumerate() {
                    *slot += sign * cond[v][project(idx, u, v, n)];
                }
                if v == 0 {
                    break;
                }
                v = (v - 1) & u;
            }
            components[u] = fu;
        }

        Ok(Self {
            d,
            n,
            axes,
            mu,
            components,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Weighted integral of a function given on the grid of the axes in `mask`.
    fn integrate_on(&self, mask: usize, mut h: impl FnMut(usize) -> f64) -> f64 {
        let size = self.n.pow(mask.count_ones());
        let mut s = CompensatedSum::default();
        for idx in 0..size {
            s.add(self.grid_weight(idx, mask) * h(idx));
        }
        s.value()
    }

    fn grid_weight(&self, idx: usize, mask: usize) -> f64 {
        let mut rem = idx;
        let mut w = 1.0;
        for (k, axis) in self.axes.iter().enumerate() {
            if mask & (1 << k) != 0 {
                w *= axis.weights[rem % self.n];
                rem /= self.n;
            }
        }
        w
    }

    pub fn decomposition(&self) -> AnovaDecomposition {
        let variances = (0..1usize << self.d)
            .map(|u| {
                if u == 0 {
                    0.0
                } else {
                    let fu = &self.components[u];
                    self.integrate_on(u, |i| fu[i] * fu[i])
                }
            })
            .collect();
        AnovaDecomposition::new(self.d, self.mu, variances).expect("non-negative variances")
    }

    /// Checks that every component integrates to zero along each of its own
    /// coordinates and that distinct components are orthogonal.
    pub fn orthogonality(&self) -> OrthogonalityReport {
        let n = self.n;
        let mut max_partial_mean: f64 = 0.0;
        for u in 1..1usize << self.d {
            let fu = &self.components[u];
            let mut pos = 0;
            for k in 0..self.d {
                if u & (1 << k) == 0 {
                    continue;
                }
                let stride = n.pow(pos);
                pos += 1;
                let w = &self.axes[k].weights;
                for base in 0..fu.len() {
                    if (base / stride) % n != 0 {
                        continue;
                    }
                    let m: f64 = (0..n).map(|i| w[i] * fu[base + i * stride]).sum();
                    max_partial_mean = max_partial_mean.max(m.abs());
                }
            }
        }

        let mut max_cross: f64 = 0.0;
        for u in 1..1usize << self.d {
            for v in (u + 1)..1usize << self.d {
                let joint = u | v;
                let (fu, fv) = (&self.components[u], &self.components[v]);
                let ip = self.integrate_on(joint, |idx| {
                    fu[project(idx, joint, u, n)] * fv[project(idx, joint, v, n)]
                });
                max_cross = max_cross.max(ip.abs());
            }
        }
        OrthogonalityReport {
            max_partial_mean,
            max_cross_product: max_cross,
        }
    }

    /// Inner product of components `u` and `v` under the grid measure.
    pub fn inner_product(&self, u: u32, v: u32) -> f64 {
        let (u, v) = (u as usize, v as usize);
        let joint = u | v;
        let (fu, fv) = (&self.components[u], &self.components[v]);
        self.integrate_on(joint, |idx| {
            fu[project(idx, joint, u, self.n)] * fv[project(idx, joint, v, self.n)]
        })
    }
}

/// Maps an index on the grid of axes `from` to the grid of axes `to`, `to` a subset of `from`.
fn project(idx: usize, from: usize, to: usize, n: usize) -> usize {
    let mut rem = idx;
    let (mut out, mut stride) = (0, 1);
    let mut bits = from;
    while bits != 0 {
        let k = bits.trailing_zeros();
        let i = rem % n;
        rem /= n;
        if to & (1 << k) != 0 {
            out += i * stride;
            stride *= n;
        }
        bits &= bits - 1;
    }
    out
}

fn density_of(m: &MarginalDistribution, x: f64) -> f64 {
    match m {
        MarginalDistribution::Uniform { .. } => 1.0,
        other => other.density(x),
    }
}

/// Largest deviations from the orthogonality properties of the ANOVA terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityReport {
    /// `max |int f_u rho_j dx_j|` over non-empty `u` and `j` in `u`.
    pub max_partial_mean: f64,
    /// `max |<f_u, f_v>|` over distinct non-empty `u`, `v`.
    pub max_cross_product: f64,
}

impl OrthogonalityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_partial_mean <= tol && self.max_cross_product <= tol
    }
}

/// Quadrature ANOVA oracle for `d <= 4`.
pub fn anova_oracle(
    f: &ModelFunction,
    space: &InputSpace,
    rule: QuadratureRule,
    truncation: &[Option<(f64, f64)>],
) -> Result<AnovaDecomposition> {
    Ok(AnovaComponents::compute(f, space, rule, truncation)?.decomposition())
}

/// Orthogonality of the oracle's ANOVA components.
pub fn orthogonality_check(
    f: &ModelFunction,
    space: &InputSpace,
    rule: QuadratureRule,
    truncation: &[Option<(f64, f64)>],
) -> Result<OrthogonalityReport> {
    Ok(AnovaComponents::compute(f, space, rule, truncation)?.orthogonality())
}
