//! Monte Carlo estimation of Shapley effects for variance-based global
//! sensitivity analysis, with exact references for analytic test models.
//!
//! ```
//! use shapley_effects::{estimate_shapley_all, EstimatorConfig, Ishigami, ModelFunction};
//!
//! let f = ModelFunction::new(Ishigami::default());
//! let space = Ishigami::input_space();
//! let report = estimate_shapley_all(&f, &space, &EstimatorConfig::new(4096, 7)).unwrap();
//! assert_eq!(report.eval_count, 4 * 4096);
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod input;
pub mod models;
pub mod numeric;
pub mod reference;

pub use analysis::{convergence_study, ConvergenceStudy, EstimatorKind, SseMetric, StudyConfig};
pub use error::{Error, Result};
pub use estimators::{
    estimate_main_effects, estimate_shapley_all, estimate_shapley_winding, estimate_total_effects,
    EffectKind, EffectReport, EstimatorConfig, ShapleyReport,
};
pub use input::{
    random_permutation, InputSpace, MarginalDistribution, Permutation, RngStream, SampleMatrix,
};
pub use models::{Constant, ExternalModel, Ishigami, Model, ModelFunction, PlateBuckling, SobolG};
pub use reference::{
    anova_oracle, ishigami_exact, orthogonality_check, shapley_from_anova, sobol_g_exact,
    AnovaDecomposition, QuadratureRule, SensitivityIndices,
};
