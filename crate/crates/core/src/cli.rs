//! Command-line front end: JSON configs in, JSON or CSV reports out.
//!
//! Exit codes: `0` success, `1` I/O failure, `2` invalid configuration or
//! arguments, `3` model evaluation failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{convergence_study, ConvergenceStudy, EstimatorKind, StudyConfig};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_main_effects, estimate_shapley_all, estimate_shapley_winding, estimate_total_effects,
    EstimatorConfig, DEFAULT_CI_Z,
};
use crate::input::{InputSpace, MarginalDistribution};
use crate::models::{
    Constant, ExternalModel, Ishigami, Model, ModelFunction, PlateBuckling, SobolG,
};
use crate::reference::{ishigami_exact, sobol_g_exact, SensitivityIndices};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EVALUATION: i32 = 3;

/// Model selection in a config file, tagged by `type`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Ishigami {
        #[serde(default = "default_ishigami_a")]
        a: f64,
        #[serde(default = "default_ishigami_b")]
        b: f64,
    },
    /// Either explicit weights `a`, or `d` variables with `a_j = j - 1`.
    SobolG {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
    },
    PlateBuckling {},
    Constant {
        dim: usize,
        #[serde(default)]
        value: f64,
    },
    /// A process speaking the line protocol.
    External {
        command: String,
        #[serde(default)]
        args: Vec<String>,
        dim: usize,
    },
}

fn default_ishigami_a() -> f64 {
    7.0
}

fn default_ishigami_b() -> f64 {
    0.1
}

impl ModelSpec {
    /// Built-in model by name, with its default parameters.
    pub fn builtin(name: &str) -> Result<Self> {
        Ok(match name {
            "ishigami" => Self::Ishigami { a: 7.0, b: 0.1 },
            "sobol-g" => Self::SobolG {
                a: None,
                d: Some(10),
            },
            "plate-buckling" => Self::PlateBuckling {},
            "constant" => Self::Constant { dim: 1, value: 1.0 },
            other => return Err(Error::Config(format!(
                "unknown model `{other}` (expected ishigami, sobol-g, plate-buckling or constant)"
            ))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ishigami { .. } => "ishigami",
            Self::SobolG { .. } => "sobol-g",
            Self::PlateBuckling {} => "plate-buckling",
            Self::Constant { .. } => "constant",
            Self::External { .. } => "external",
        }
    }

    fn sobol_g(a: &Option<Vec<f64>>, d: &Option<usize>) -> Result<SobolG> {
        match (a, d) {
            (Some(a), None) => SobolG::new(a.clone()),
            (None, Some(d)) => SobolG::ascending(*d),
            (Some(a), Some(d)) if a.len() == *d => SobolG::new(a.clone()),
            _ => Err(Error::Config(
                "sobol-g needs either `a` or `d` (or both, consistently)".into(),
            )),
        }
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(match self {
            Self::Ishigami { .. } => 3,
            Self::SobolG { a, d } => Model::dim(&Self::sobol_g(a, d)?),
            Self::PlateBuckling {} => 6,
            Self::Constant { dim, .. } | Self::External { dim, .. } => *dim,
        })
    }

    pub fn build(&self) -> Result<ModelFunction> {
        let param = |e: Error| Error::Config(e.to_string());
        Ok(match self {
            Self::Ishigami { a, b } => ModelFunction::new(Ishigami::new(*a, *b).map_err(param)?),
            Self::SobolG { a, d } => ModelFunction::new(Self::sobol_g(a, d).map_err(param)?),
            Self::PlateBuckling {} => ModelFunction::new(PlateBuckling),
            Self::Constant { dim, value } => {
                if *dim == 0 {
                    return Err(Error::Config("constant model needs dim >= 1".into()));
                }
                ModelFunction::new(Constant {
                    dim: *dim,
                    value: *value,
                })
            }
            Self::External { command, args, dim } => {
                ModelFunction::new(ExternalModel::spawn(command, args, *dim)?)
            }
        })
    }

    /// The input distributions the model is usually studied under.
    pub fn default_distributions(&self) -> Option<Vec<DistributionSpec>> {
        let space = match self {
            Self::Ishigami { .. } => Ishigami::input_space(),
            Self::SobolG { a, d } => Self::sobol_g(a, d).ok()?.input_space(),
            Self::PlateBuckling {} => PlateBuckling::input_space(),
            Self::Constant { dim, .. } => InputSpace::unit_cube(*dim).ok()?,
            Self::External { .. } => return None,
        };
        Some(
            space
                .marginals()
                .iter()
                .map(DistributionSpec::from)
                .collect(),
        )
    }

    /// Closed-form indices, when the model has them.
    pub fn exact(&self) -> Result<SensitivityIndices> {
        let param = |e: Error| Error::Config(e.to_string());
        match self {
            Self::Ishigami { a, b } => Ok(ishigami_exact(&Ishigami::new(*a, *b).map_err(param)?)),
            Self::SobolG { a, d } => sobol_g_exact(&Self::sobol_g(a, d).map_err(param)?),
            Self::Constant { dim, value } => Ok(SensitivityIndices {
                main: vec![0.0; *dim],
                total: vec![0.0; *dim],
                shapley: vec![0.0; *dim],
                sigma2: 0.0,
                mu: Some(*value),
            }),
            Self::PlateBuckling {} | Self::External { .. } => Err(Error::Unsupported(format!(
                "no closed-form indices for the {} model",
                self.name()
            ))),
        }
    }
}

/// Marginal distribution in a config file, tagged by `kind`.
///
/// Normal marginals take either `cv` (with `sd = |mean| cv`) or `sd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Normal {
        mean: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cv: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sd: Option<f64>,
    },
    Lognormal {
        mean: f64,
        cv: f64,
    },
}

impl DistributionSpec {
    pub fn to_marginal(&self) -> Result<MarginalDistribution> {
        let m = match *self {
            Self::Uniform { lo, hi } => MarginalDistribution::uniform(lo, hi),
            Self::Normal {
                mean,
                cv: Some(cv),
                sd: None,
            } => MarginalDistribution::normal_cv(mean, cv),
            Self::Normal {
                mean,
                cv: None,
                sd: Some(sd),
            } => MarginalDistribution::normal(mean, sd),
            Self::Normal { .. } => {
                return Err(Error::Config(
                    "normal needs exactly one of `cv` or `sd`".into(),
                ))
            }
            Self::Lognormal { mean, cv } => MarginalDistribution::lognormal(mean, cv),
        };
        m.map_err(|e| Error::Config(e.to_string()))
    }
}

impl From<&MarginalDistribution> for DistributionSpec {
    fn from(m: &MarginalDistribution) -> Self {
        match *m {
            MarginalDistribution::Uniform { lo, hi } => Self::Uniform { lo, hi },
            MarginalDistribution::Normal { mean, sd } => Self::Normal {
                mean,
                cv: None,
                sd: Some(sd),
            },
            MarginalDistribution::LogNormal { mean, cv } => Self::Lognormal { mean, cv },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

fn default_n() -> usize {
    1 << 14
}

fn default_ci_z() -> f64 {
    DEFAULT_CI_Z
}

fn default_workers() -> usize {
    1
}

/// Everything needed to reproduce a run. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub model: ModelSpec,
    /// Marginals in variable order; defaults to the model's usual inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distributions: Option<Vec<DistributionSpec>>,
    #[serde(default = "default_estimator")]
    pub estimator: EstimatorKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Trials per sample size in convergence studies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Sample sizes for convergence studies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default = "default_ci_z")]
    pub ci_z: f64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Close the winding-stairs sequence on itself (`dN` instead of `dN + 1` evaluations).
    #[serde(default)]
    pub cyclic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Report format; `convergence` defaults to CSV, the others to JSON.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

fn default_estimator() -> EstimatorKind {
    EstimatorKind::Shapley
}

impl AnalysisConfig {
    pub fn for_model(model: ModelSpec) -> Self {
        Self {
            model,
            distributions: None,
            estimator: EstimatorKind::Shapley,
            n: default_n(),
            seed: 0,
            trials: None,
            ns: None,
            ci_z: DEFAULT_CI_Z,
            workers: 1,
            cyclic: false,
            output: None,
            format: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fills defaults and checks cross-field invariants.
    pub fn resolve(mut self) -> Result<Self> {
        let dim = self.model.dim()?;
        if self.distributions.is_none() {
            self.distributions = self.model.default_distributions();
        }
        let dists = self.distributions.as_ref().ok_or_else(|| {
            Error::Config(format!(
                "the {} model needs explicit distributions",
                self.model.name()
            ))
        })?;
        if dists.len() != dim {
            return Err(Error::Config(format!(
                "{} distributions given for a {dim}-dimensional model",
                dists.len()
            )));
        }
        for d in dists {
            d.to_marginal()?;
        }
        if self.n < 2 {
            return Err(Error::Config(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(self.ci_z.is_finite() && self.ci_z > 0.0) {
            return Err(Error::Config(format!(
                "ci_z must be positive, got {}",
                self.ci_z
            )));
        }
        if let Some(r) = self.trials {
            if r < 2 {
                return Err(Error::Config(format!("trials must be at least 2, got {r}")));
            }
        }
        Ok(self)
    }

    pub fn input_space(&self) -> Result<InputSpace> {
        let dists = self
            .distributions
            .as_ref()
            .ok_or_else(|| Error::Config("distributions not resolved".into()))?;
        let marginals = dists
            .iter()
            .map(|d| d.to_marginal())
            .collect::<Result<Vec<_>>>()?;
        InputSpace::new(marginals).map_err(|e| Error::Config(e.to_string()))
    }

    fn estimator_config(&self) -> EstimatorConfig {
        EstimatorConfig::new(self.n, self.seed)
            .with_workers(self.workers)
            .with_ci_z(self.ci_z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableResult {
    /// 1-based variable index.
    pub variable: usize,
    pub estimate: f64,
    pub variance: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub version: String,
    pub config: AnalysisConfig,
    pub estimator: EstimatorKind,
    pub results: Vec<VariableResult>,
    /// Sum of the Shapley estimates; absent for main/total effects.
    pub sigma2_estimate: Option<f64>,
    pub eval_count: u64,
    pub seed: u64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactResult {
    pub variable: usize,
    pub main: f64,
    pub shapley: f64,
    pub total: f64,
}

/// Output of `exact`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactReport {
    pub version: String,
    pub model: ModelSpec,
    pub results: Vec<ExactResult>,
    pub sigma2: f64,
    pub mu: Option<f64>,
}

/// Output of `convergence` in JSON form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub version: String,
    pub config: AnalysisConfig,
    pub study: ConvergenceStudy,
}

fn zip_results(
    estimates: &[f64],
    variance: Option<&[f64]>,
    lo: Option<&[f64]>,
    hi: Option<&[f64]>,
) -> Vec<VariableResult> {
    (0..estimates.len())
        .map(|j| VariableResult {
            variable: j + 1,
            estimate: estimates[j],
            variance: variance.map(|v| v[j]),
            ci_low: lo.map(|v| v[j]),
            ci_high: hi.map(|v| v[j]),
        })
        .collect()
}

/// Runs the configured estimator once.
pub fn cmd_analyze(config: &AnalysisConfig) -> Result<AnalysisReport> {
    let config = config.clone().resolve()?;
    let space = config.input_space()?;
    let f = config.model.build()?;
    let cfg = config.estimator_config();
    let start = Instant::now();
    let (results, sigma2, evals) = match config.estimator {
        EstimatorKind::Shapley | EstimatorKind::ShapleyWinding => {
            let r = if config.estimator == EstimatorKind::Shapley {
                estimate_shapley_all(&f, &space, &cfg)?
            } else {
                estimate_shapley_winding(&f, &space, &cfg, config.cyclic)?
            };
            let results = zip_results(
                &r.estimates,
                r.variance.as_deref(),
                r.ci_low.as_deref(),
                r.ci_high.as_deref(),
            );
            (results, Some(r.sigma2_estimate), r.eval_count)
        }
        EstimatorKind::Main | EstimatorKind::Total => {
            let r = if config.estimator == EstimatorKind::Main {
                estimate_main_effects(&f, &space, &cfg)?
            } else {
                estimate_total_effects(&f, &space, &cfg)?
            };
            let results = zip_results(
                &r.values,
                Some(&r.variance),
                Some(&r.ci_low),
                Some(&r.ci_high),
            );
            (results, None, r.eval_count)
        }
    };
    Ok(AnalysisReport {
        version: VERSION.to_string(),
        seed: config.seed,
        estimator: config.estimator,
        config,
        results,
        sigma2_estimate: sigma2,
        eval_count: evals,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Default sample-size ladder `2^8, ..., 2^14`.
pub fn default_sample_sizes() -> Vec<usize> {
    (8..=14).map(|k| 1usize << k).collect()
}

/// Repeats the configured estimator over a ladder of sample sizes.
pub fn cmd_convergence(config: &AnalysisConfig) -> Result<(AnalysisConfig, ConvergenceStudy)> {
    let mut config = config.clone().resolve()?;
    config.trials.get_or_insert(10);
    config.ns.get_or_insert_with(default_sample_sizes);
    let space = config.input_space()?;
    let f = config.model.build()?;
    let reference = config.model.exact().ok().map(|ex| match config.estimator {
        EstimatorKind::Shapley | EstimatorKind::ShapleyWinding => ex.shapley,
        EstimatorKind::Main => ex.main,
        EstimatorKind::Total => ex.total,
    });
    // exact references only hold under the model's own input distributions
    let reference =
        reference.filter(|_| config.distributions == config.model.default_distributions());
    let study_cfg = StudyConfig {
        kind: config.estimator,
        sample_sizes: config.ns.clone().unwrap_or_default(),
        trials: config.trials.unwrap_or(10),
        base_seed: config.seed,
        workers: config.workers,
        reference,
    };
    let study =
        convergence_study(config.model.name(), &f, &space, &study_cfg).map_err(|e| match e {
            Error::Parameter(msg) => Error::Config(msg),
            other => other,
        })?;
    Ok((config, study))
}

/// Closed-form indices of an analytic built-in model.
pub fn cmd_exact(config: &AnalysisConfig) -> Result<ExactReport> {
    let ex = config.model.exact().map_err(|e| match e {
        Error::Unsupported(msg) => Error::Config(msg),
        other => other,
    })?;
    if let Some(dists) = &config.distributions {
        if Some(dists) != config.model.default_distributions().as_ref() {
            return Err(Error::Config(
                "exact indices are only available for the model's default inputs".into(),
            ));
        }
    }
    Ok(ExactReport {
        version: VERSION.to_string(),
        model: config.model.clone(),
        results: (0..ex.dim())
            .map(|j| ExactResult {
                variable: j + 1,
                main: ex.main[j],
                shapley: ex.shapley[j],
                total: ex.total[j],
            })
            .collect(),
        sigma2: ex.sigma2,
        mu: ex.mu,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

impl AnalysisReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("variable,estimate,variance,ci_low,ci_high\n");
        for r in &self.results {
            s += &format!(
                "{},{:?},{},{},{}\n",
                r.variable,
                r.estimate,
                opt(r.variance),
                opt(r.ci_low),
                opt(r.ci_high)
            );
        }
        if let Some(s2) = self.sigma2_estimate {
            s += &format!("#sigma2_estimate,{s2:?}\n");
        }
        s += &format!("#eval_count,{}\n#seed,{}\n", self.eval_count, self.seed);
        s
    }
}

impl ExactReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("variable,main,shapley,total\n");
        for r in &self.results {
            s += &format!(
                "{},{:?},{:?},{:?}\n",
                r.variable, r.main, r.shapley, r.total
            );
        }
        s += &format!("#sigma2,{:?}\n", self.sigma2);
        s
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "shapley-effects",
    version,
    about = "Variance-based sensitivity analysis with Shapley effects"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate sensitivity indices once and write a report.
    Analyze(RunArgs),
    /// Run repeated trials over a ladder of sample sizes and write SSE data as CSV.
    Convergence(RunArgs),
    /// Write closed-form indices of an analytic built-in model.
    Exact(RunArgs),
}

/// Flags shared by all subcommands; they override values from `--config`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in model: ishigami, sobol-g, plate-buckling or constant.
    #[arg(long)]
    pub model: Option<String>,
    /// Estimator: shapley, shapley-winding, main or total.
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated sample sizes for convergence studies.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl RunArgs {
    /// Loads `--config` (if any) and applies the flag overrides.
    pub fn to_config(&self) -> Result<AnalysisConfig> {
        let mut cfg = match (&self.config, &self.model) {
            (Some(path), _) => AnalysisConfig::load(path)?,
            (None, Some(name)) => AnalysisConfig::for_model(ModelSpec::builtin(name)?),
            (None, None) => return Err(Error::Config("give --config or --model".into())),
        };
        if let (Some(_), Some(name)) = (&self.config, &self.model) {
            cfg.model = ModelSpec::builtin(name)?;
            cfg.distributions = None;
        }
        if let Some(e) = &self.estimator {
            cfg.estimator = serde_json::from_value(serde_json::Value::String(e.clone()))
                .map_err(|_| Error::Config(format!("unknown estimator `{e}`")))?;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(t) = self.trials {
            cfg.trials = Some(t);
        }
        if let Some(ns) = &self.ns {
            cfg.ns = Some(ns.clone());
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.format = Some(f);
        }
        Ok(cfg)
    }
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Evaluation { .. } | Error::Trial { .. } => EXIT_EVALUATION,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable report");
    s.push('\n');
    s
}

/// Executes one parsed command, returning the text written.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Analyze(args) => {
            let cfg = args.to_config()?;
            let report = cmd_analyze(&cfg)?;
            let text = match report.config.format.unwrap_or_default() {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => report.to_csv(),
            };
            emit(&text, report.config.output.as_deref())?;
            Ok(text)
        }
        Command::Convergence(args) => {
            let cfg = args.to_config()?;
            let (cfg, study) = cmd_convergence(&cfg)?;
            let text = match cfg.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    study.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("ascii csv")
                }
                OutputFormat::Json => to_json(&ConvergenceReport {
                    version: VERSION.to_string(),
                    config: cfg.clone(),
                    study,
                }),
            };
            emit(&text, cfg.output.as_deref())?;
            Ok(text)
        }
        Command::Exact(args) => {
            let cfg = args.to_config()?;
            let report = cmd_exact(&cfg)?;
            let text = match cfg.format.unwrap_or_default() {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => report.to_csv(),
            };
            emit(&text, cfg.output.as_deref())?;
            Ok(text)
        }
    }
}

/// Parses arguments, runs the command, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
