use crate::model::VariableDomain;

/// Errors produced by model construction, solvers, and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: u32, num_vars: usize },

    #[error("domain mismatch: expected {expected:?}, got {actual:?}")]
    DomainMismatch {
        expected: VariableDomain,
        actual: VariableDomain,
    },

    #[error("dimension mismatch: {context} expects {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("polynomial has degree {degree}; {context} requires degree <= 2")]
    DegreeTooHigh { degree: usize, context: &'static str },

    #[error("exhaustive search over {num_vars} variables exceeds the cap of {cap}")]
    TooManyVariables { num_vars: usize, cap: usize },

    #[error(
        "harvested-power target {delta_uw} uW is unattainable; the harvester output peaks at {max_uw:.3} uW"
    )]
    UnattainableHarvestTarget { delta_uw: f64, max_uw: f64 },

    #[error("all {restarts} bifurcation restarts diverged to non-finite state")]
    DivergentDynamics { restarts: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("screening exhausted {attempts} candidate channels but found only {found} of {requested} feasible ones")]
    ScreeningExhausted {
        attempts: usize,
        found: usize,
        requested: usize,
    },

    #[error("relative metrics requested but no reference scheme is present in the run")]
    MissingReference,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
