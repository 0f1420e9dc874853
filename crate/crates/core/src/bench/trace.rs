use std::fmt;
use std::str::FromStr;

use crate::error::MetricError;
use crate::problem::Problem;

/// Error measure plotted against normalized iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `|estimate - X*|_inf`; needs a known fixed point.
    Distance,
    /// `|H(estimate) - estimate|_inf`.
    Residual,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Distance => "distance",
            Metric::Residual => "residual",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Requested metric; `Auto` picks distance when the problem has a known
/// fixed point and residual otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MetricKind {
    #[default]
    Auto,
    Distance,
    Residual,
}

impl MetricKind {
    pub fn resolve(self, problem: &Problem) -> Result<Metric, MetricError> {
        match self {
            MetricKind::Auto if problem.known_fixed_point().is_some() => Ok(Metric::Distance),
            MetricKind::Auto | MetricKind::Residual => Ok(Metric::Residual),
            MetricKind::Distance if problem.known_fixed_point().is_some() => Ok(Metric::Distance),
            MetricKind::Distance => Err(MetricError::MissingFixedPoint),
        }
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(MetricKind::Auto),
            "distance" => Ok(MetricKind::Distance),
            "residual" => Ok(MetricKind::Residual),
            other => Err(format!(
                "unknown metric `{other}` (expected auto, distance or residual)"
            )),
        }
    }
}

/// `updates / N`: one normalized iteration is `N` coordinate updates.
pub fn normalized_iteration(coordinate_updates: u64, n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    coordinate_updates as f64 / n as f64
}

pub fn error_metric(
    estimate: &[f64],
    problem: &Problem,
    metric: Metric,
) -> Result<f64, MetricError> {
    let n = problem.dimension();
    if estimate.len() != n {
        return Err(MetricError::Length {
            expected: n,
            got: estimate.len(),
        });
    }
    let max_abs_diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
    };
    match metric {
        Metric::Distance => {
            let xs = problem
                .known_fixed_point()
                .ok_or(MetricError::MissingFixedPoint)?;
            Ok(max_abs_diff(estimate, xs))
        }
        Metric::Residual => {
            let image = problem.operator().eval(estimate)?;
            Ok(max_abs_diff(&image, estimate))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub normalized_iteration: f64,
    pub error: f64,
}

/// Sampled convergence curve of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub method: String,
    pub strategy: String,
    pub seed: Option<u64>,
    pub metric: Metric,
    samples: Vec<Sample>,
}

impl Trace {
    pub fn new(
        method: impl Into<String>,
        strategy: impl Into<String>,
        seed: Option<u64>,
        metric: Metric,
    ) -> Self {
        Self {
            method: method.into(),
            strategy: strategy.into(),
            seed,
            metric,
            samples: Vec::new(),
        }
    }

    /// Appends a sample.
    ///
    /// Panics unless the iteration is strictly larger than the previous one
    /// and the error is finite and non-negative.
    pub fn push(&mut self, normalized_iteration: f64, error: f64) {
        assert!(
            error.is_finite() && error >= 0.0,
            "trace error must be finite and non-negative, got {error}"
        );
        if let Some(last) = self.samples.last() {
            assert!(
                normalized_iteration > last.normalized_iteration,
                "trace iterations must increase: {} after {}",
                normalized_iteration,
                last.normalized_iteration
            );
        }
        self.samples.push(Sample {
            normalized_iteration,
            error,
        });
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Error of the sample taken exactly at `iteration`, if any.
    pub fn error_at(&self, iteration: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.normalized_iteration == iteration)
            .map(|s| s.error)
    }
}
