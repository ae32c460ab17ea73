use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column}: cannot parse {value:?} as a finite real")]
    Parse {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("zero data rows")]
    ZeroRows,

    #[error("expected at least 2 columns, found {0}")]
    TooFewColumns(usize),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("insufficient rows for covariance: need at least 2, have {0}")]
    InsufficientRows(usize),

    #[error("collinear design; use pls_fit (reciprocal condition {rcond:.3e})")]
    Collinear { rcond: f64 },

    #[error("zero residual variance")]
    ZeroResidualVariance,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{name} = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: String,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("population PLS did not stop within {steps} steps (residual norm {residual:.3e})")]
    NonConvergence { steps: usize, residual: f64 },

    #[error("empty envelope")]
    EmptyEnvelope,

    #[error("envelope reconstruction failed: relative error {0:.3e}")]
    EnvelopeReconstruction(f64),

    #[error("quantile search did not bracket alpha = {alpha}")]
    NoBracket { alpha: f64 },

    #[error("fiducial inverse failed for u = {u}")]
    InverseFailed { u: f64 },

    #[error("invalid causal model: {0}")]
    InvalidCausalModel(String),

    #[error("conditional distribution undefined for c = {0} (zero probability)")]
    UndefinedConditional(usize),

    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("{value} is not an eigenvalue")]
    NotAnEigenvalue { value: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("inconsistent attraction factors: prospect {label:?} has probability {probability}")]
    InconsistentAttraction { label: String, probability: f64 },

    #[error("invalid prospect set: {0}")]
    InvalidProspects(String),
}

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl ToString,
        expected: impl Into<String>,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            expected: expected.into(),
        }
    }
}
