use thiserror::Error;

/// Errors raised by sampling, model evaluation, estimation and reporting.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid distribution, estimator or study parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A model evaluation failed or returned a non-finite value.
    #[error("evaluation failed at sample {sample} (x = {point:?}): {message}")]
    Evaluation {
        sample: usize,
        point: Vec<f64>,
        message: String,
    },

    /// Problem size beyond what exact enumeration supports.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The requested computation is not supported for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Failure inside one trial of a convergence study.
    #[error("trial {trial} at N = {n}: {source}")]
    Trial {
        n: usize,
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Re-tags an evaluation failure with the sample index it occurred in.
    pub(crate) fn at_sample(self, sample: usize) -> Self {
        match self {
            Error::Evaluation { point, message, .. } => Error::Evaluation {
                sample,
                point,
                message,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
