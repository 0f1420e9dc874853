//! Error types shared across the solver, operators and benchmark harness.

use thiserror::Error;

/// Failure to evaluate an operator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    /// The point lies outside the operator's domain.
    #[error("operator domain violation at coordinate {coordinate}: {reason} (point {point:?})")]
    Domain {
        coordinate: usize,
        point: Vec<f64>,
        reason: String,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate {index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
}

/// Errors raised while stepping or running a solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("coordinate {index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
    /// The operator could not be evaluated at an iterate.
    #[error("step {step} (coordinate {coordinate}): {source}")]
    Domain {
        step: u64,
        coordinate: usize,
        #[source]
        source: OperatorError,
    },
    /// A non-finite value appeared in the iterate.
    #[error("step {step}: non-finite value {value} at coordinate {coordinate}")]
    NonFinite {
        step: u64,
        coordinate: usize,
        value: f64,
    },
    /// Closed-form increment and two full evaluations disagree.
    #[error(
        "step {step}: increment mismatch updating coordinate {coordinate}, component {component}: \
         closed form {closed_form}, full evaluation {full_eval}"
    )]
    IncrementMismatch {
        step: u64,
        coordinate: usize,
        component: usize,
        closed_form: f64,
        full_eval: f64,
    },
    #[error("step {step}: error metric is not finite")]
    NonFiniteMetric { step: u64 },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("invalid stop rule: {0}")]
    StopRule(String),
}

impl SolveError {
    /// Step index at which the error occurred, when known.
    pub fn step(&self) -> Option<u64> {
        match self {
            SolveError::Domain { step, .. }
            | SolveError::NonFinite { step, .. }
            | SolveError::IncrementMismatch { step, .. }
            | SolveError::NonFiniteMetric { step } => Some(*step),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("initial vector has length {got}, operator dimension is {expected}")]
    InitialLength { expected: usize, got: usize },
    #[error("known fixed point has length {got}, operator dimension is {expected}")]
    FixedPointLength { expected: usize, got: usize },
    #[error("claimed fixed point has residual {residual:e} > {tolerance:e}")]
    NotAFixedPoint { residual: f64, tolerance: f64 },
    #[error("operator has dimension 0")]
    EmptyDimension,
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("distance metric requested but the problem has no known fixed point")]
    MissingFixedPoint,
    #[error("estimate has length {got}, problem dimension is {expected}")]
    Length { expected: usize, got: usize },
    #[error("residual metric: {0}")]
    Operator(#[from] OperatorError),
}

/// Matrix Market ingestion errors.
#[derive(Debug, Error)]
pub enum MatrixMarketError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported Matrix Market variant: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("traces mix metric kinds ({first} and {other})")]
    MixedMetrics { first: String, other: String },
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Invalid sparse matrix data. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("entry ({row}, {col}) out of bounds for a {dim}x{dim} matrix")]
    OutOfBounds { row: usize, col: usize, dim: usize },
    #[error("non-finite value {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("duplicate entry at ({row}, {col})")]
    Duplicate { row: usize, col: usize },
}
