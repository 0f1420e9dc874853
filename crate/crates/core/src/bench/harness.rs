use std::fmt;
use std::str::FromStr;
use std::thread;

use super::trace::{MetricKind, Trace};
use crate::baselines::{run_baseline, Baseline, SweepRule};
use crate::error::SolveError;
use crate::problem::Problem;
use crate::run::{OsbSolver, StopRule};
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Osb,
    Jacobi,
    GaussSeidel,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Osb, Method::Jacobi, Method::GaussSeidel];

    pub fn label(self) -> &'static str {
        match self {
            Method::Osb => "osb",
            Method::Jacobi => "jacobi",
            Method::GaussSeidel => "gauss-seidel",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "osb" => Ok(Method::Osb),
            "jacobi" => Ok(Method::Jacobi),
            "gauss-seidel" => Ok(Method::GaussSeidel),
            other => Err(format!(
                "unknown method `{other}` (expected osb, jacobi or gauss-seidel)"
            )),
        }
    }
}

/// Shared stopping budget in normalized iterations: `N` coordinate updates
/// for the one-step-back method, one sweep for a baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub tolerance: f64,
    pub max_iterations: f64,
}

impl Budget {
    pub fn stop_rule(&self, n: usize) -> StopRule {
        StopRule::normalized(self.tolerance, self.max_iterations, n)
    }

    pub fn sweep_rule(&self) -> SweepRule {
        SweepRule {
            tolerance: self.tolerance,
            max_sweeps: Some(self.max_iterations.floor() as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub methods: Vec<Method>,
    pub strategy: StrategyKind,
    pub seed: u64,
    pub budget: Budget,
    pub metric: MetricKind,
}

#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub method: Method,
    pub trace: Trace,
    pub converged: bool,
    pub error: Option<SolveError>,
}

impl MethodOutcome {
    pub fn final_iteration(&self) -> f64 {
        self.trace.last().map_or(0.0, |s| s.normalized_iteration)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.trace.last().map(|s| s.error)
    }
}

/// Runs one method on `problem`.
pub fn run_method(problem: &Problem, method: Method, config: &ComparisonConfig) -> MethodOutcome {
    let result = match method {
        Method::Osb => {
            let mut schedule = config.strategy.build(config.seed);
            OsbSolver::new(config.budget.stop_rule(problem.dimension()))
                .metric(config.metric)
                .run(problem, schedule.as_mut())
                .map(|r| (r.trace, r.converged))
        }
        Method::Jacobi | Method::GaussSeidel => {
            let baseline = if method == Method::Jacobi {
                Baseline::Jacobi
            } else {
                Baseline::GaussSeidel
            };
            run_baseline(problem, baseline, config.budget.sweep_rule(), config.metric)
                .map(|r| (r.trace, r.converged))
        }
    };
    match result {
        Ok((trace, converged)) => MethodOutcome {
            method,
            trace,
            converged,
            error: None,
        },
        Err(failure) => MethodOutcome {
            method,
            trace: failure.trace,
            converged: false,
            error: Some(failure.error),
        },
    }
}

/// Runs every configured method on the same problem, concurrently, and
/// returns the outcomes in configuration order. A failing method does not
/// affect the others.
pub fn compare(problem: &Problem, config: &ComparisonConfig) -> Vec<MethodOutcome> {
    thread::scope(|scope| {
        let handles: Vec<_> = config
            .methods
            .iter()
            .map(|&m| scope.spawn(move || run_method(problem, m, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}
