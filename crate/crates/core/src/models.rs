//! Functions under analysis and the evaluation-counting wrapper.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::input::{InputSpace, MarginalDistribution};

/// A scalar function of `dim()` real inputs.
///
/// Implementations must be pure: the same input yields the same output.
pub trait Model: Send + Sync {
    fn dim(&self) -> usize;

    fn evaluate(&self, x: &[f64]) -> Result<f64>;

    /// Whether `evaluate` may be called from several threads at once
    /// without serialising on a shared resource.
    fn supports_concurrency(&self) -> bool {
        true
    }
}

/// Shorthand for an evaluation failure before the sample index is known.
pub(crate) fn eval_error(x: &[f64], message: impl Into<String>) -> Error {
    Error::Evaluation {
        sample: 0,
        point: x.to_vec(),
        message: message.into(),
    }
}

/// A model together with an atomic count of the evaluations made through it.
pub struct ModelFunction {
    inner: Box<dyn Model>,
    evals: AtomicU64,
}

impl ModelFunction {
    pub fn new(model: impl Model + 'static) -> Self {
        Self::from_boxed(Box::new(model))
    }

    pub fn from_boxed(inner: Box<dyn Model>) -> Self {
        Self {
            inner,
            evals: AtomicU64::new(0),
        }
    }

    /// Wraps an infallible closure of `dim` inputs.
    pub fn from_fn<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(FnModel { dim, f })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn supports_concurrency(&self) -> bool {
        self.inner.supports_concurrency()
    }

    /// Evaluates the model; every call counts, including failed ones.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        self.inner.evaluate(x)
    }

    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }
}

impl fmt::Debug for ModelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFunction")
            .field("dim", &self.dim())
            .field("evals", &self.eval_count())
            .finish()
    }
}

struct FnModel<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> Model for FnModel<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }
}

/// `f(x) = c` on `dim` inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant {
    pub dim: usize,
    pub value: f64,
}

impl Model for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, _x: &[f64]) -> Result<f64> {
        Ok(self.value)
    }
}

/// Ishigami function `(1 + b x3^4) sin x1 + a sin^2 x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ishigami {
    pub a: f64,
    pub b: f64,
}

impl Default for Ishigami {
    fn default() -> Self {
        Self { a: 7.0, b: 0.1 }
    }
}

impl Ishigami {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::Parameter(format!(
                "Ishigami requires a, b > 0, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let s2 = x[1].sin();
        self.b.mul_add(x[2].powi(4), 1.0) * x[0].sin() + self.a * s2 * s2
    }

    /// Uniform inputs on `[-pi, pi]^3`.
    pub fn input_space() -> InputSpace {
        InputSpace::iid(MarginalDistribution::Uniform { lo: -PI, hi: PI }, 3)
            .expect("valid Ishigami space")
    }
}

impl Model for Ishigami {
    fn dim(&self) -> usize {
        3
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value(x))
    }
}

/// Sobol' g function `prod_j (|4 x_j - 2| + a_j) / (1 + a_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolG {
    a: Vec<f64>,
}

impl SobolG {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Parameter(
                "Sobol' g needs at least one weight".into(),
            ));
        }
        if let Some(bad) = a.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Parameter(format!(
                "Sobol' g weights must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self { a })
    }

    /// Weights `a_j = j - 1` for `j = 1..=d`, ordering variables by decreasing importance.
    pub fn ascending(d: usize) -> Result<Self> {
        Self::new((0..d).map(|j| j as f64).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.a)
            .map(|(&xj, &aj)| ((4.0 * xj - 2.0).abs() + aj) / (1.0 + aj))
            .product()
    }

    pub fn input_space(&self) -> InputSpace {
        InputSpace::unit_cube(self.a.len()).expect("valid unit cube")
    }
}

impl Model for SobolG {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value(x))
    }
}

/// Buckling strength of a rectangular plate under uniaxial compression.
///
/// Inputs: width, thickness, yield stress, elastic modulus, initial
/// deflection, residual stress. Units are left to the caller.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlateBuckling;

impl PlateBuckling {
    /// `(label, mean, cv, log-normal?)` for each input.
    pub const INPUTS: [(&'static str, f64, f64, bool); 6] = [
        ("width", 23.808, 0.028, false),
        ("thickness", 0.525, 0.044, true),
        ("yield stress", 44.2, 0.1235, true),
        ("elastic modulus", 28623.0, 0.076, false),
        ("initial deflection", 0.35, 0.05, false),
        ("residual stress", 5.25, 0.07, false),
    ];

    /// Slenderness `lambda = (x1 / x2) sqrt(x3 / x4)`.
    pub fn slenderness(x: &[f64]) -> f64 {
        (x[0] / x[1]) * (x[2] / x[3]).sqrt()
    }

    pub fn value(x: &[f64]) -> Result<f64> {
        if let Some(i) = x[..4].iter().position(|&v| v.is_nan() || v <= 0.0) {
            return Err(eval_error(
                x,
                format!("plate buckling requires positive x{}, got {}", i + 1, x[i]),
            ));
        }
        let lambda = Self::slenderness(x);
        Ok((2.1 / lambda - 0.9 / (lambda * lambda))
            * (1.0 - 0.75 * x[4] / lambda)
            * (1.0 - 2.0 * x[1] * x[5] / x[0]))
    }

    pub fn input_space() -> InputSpace {
        let marginals = Self::INPUTS
            .iter()
            .map(|&(_, mean, cv, log)| {
                if log {
                    MarginalDistribution::lognormal(mean, cv)
                } else {
                    MarginalDistribution::normal_cv(mean, cv)
                }
            })
            .collect::<Result<Vec<_>>>()
            .expect("valid plate buckling marginals");
        InputSpace::new(marginals).expect("non-empty")
    }

    pub fn means() -> [f64; 6] {
        Self::INPUTS.map(|(_, mean, _, _)| mean)
    }
}

impl Model for PlateBuckling {
    fn dim(&self) -> usize {
        6
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Self::value(x)
    }
}

/// A model evaluated by an external process over a line protocol.
///
/// Each request is one line of `dim` space-separated decimal floats; the
/// process answers each with one decimal float on its own line. Closing the
/// process's stdin signals the end of the session. Requests are serialised,
/// one in flight at a time.
pub struct ExternalModel {
    dim: usize,
    program: String,
    io: Mutex<ProcessIo>,
}

struct ProcessIo {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    lines: usize,
    request: String,
    reply: String,
}

impl ExternalModel {
    pub fn spawn<S: AsRef<str>>(program: &str, args: &[S], dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter(
                "external model dimension must be >= 1".into(),
            ));
        }
        let mut child = Command::new(program)
            .args(args.iter().map(AsRef::as_ref))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Config(format!("cannot start `{program}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            dim,
            program: program.to_string(),
            io: Mutex::new(ProcessIo {
                child,
                stdin: Some(stdin),
                stdout,
                lines: 0,
                request: String::new(),
                reply: String::new(),
            }),
        })
    }

    /// Number of request lines sent so far.
    pub fn lines_sent(&self) -> usize {
        self.io.lock().map(|io| io.lines).unwrap_or(0)
    }
}

impl Model for ExternalModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn supports_concurrency(&self) -> bool {
        false
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        use std::fmt::Write as _;

        let mut guard = self
            .io
            .lock()
            .map_err(|_| eval_error(x, "external model state poisoned"))?;
        let io = &mut *guard;
        io.lines += 1;
        let line = io.lines;
        let fail = |msg: String| eval_error(x, format!("`{}` line {line}: {msg}", self.program));

        io.request.clear();
        for (i, v) in x.iter().enumerate() {
            if i > 0 {
                io.request.push(' ');
            }
            let _ = write!(io.request, "{v:?}");
        }
        io.request.push('\n');
        let stdin = io
            .stdin
            .as_mut()
            .ok_or_else(|| fail("stdin already closed".into()))?;
        stdin
            .write_all(io.request.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| fail(format!("write failed: {e}")))?;

        io.reply.clear();
        let read = io
            .stdout
            .read_line(&mut io.reply)
            .map_err(|e| fail(format!("read failed: {e}")))?;
        if read == 0 {
            return Err(fail("process closed its output".into()));
        }
        let text = io.reply.trim();
        text.parse::<f64>()
            .map_err(|_| fail(format!("malformed reply {text:?}")))
    }
}

impl Drop for ExternalModel {
    fn drop(&mut self) {
        if let Ok(io) = self.io.get_mut() {
            io.stdin.take();
            let _ = io.child.wait();
        }
    }
}

impl fmt::Debug for ExternalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExternalModel")
            .field("program", &self.program)
            .field("dim", &self.dim)
            .finish()
    }
}
