//! Jacobi and Gauss-Seidel sweeps for comparison with the one-step-back
//! iteration. The baseline estimate is the iterate `X` itself.

use std::fmt;
use std::str::FromStr;

use crate::bench::{error_metric, Metric, MetricKind, Trace};
use crate::error::{OperatorError, SolveError};
use crate::operators::Operator;
use crate::problem::Problem;
use crate::run::RunFailure;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    pub x: Vec<f64>,
    pub sweep_count: u64,
}

impl BaselineState {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, sweep_count: 0 }
    }
}

fn domain(step: u64, coordinate: usize) -> impl FnOnce(OperatorError) -> SolveError {
    move |source| SolveError::Domain {
        step,
        coordinate,
        source,
    }
}

fn ensure_finite(x: &[f64], step: u64) -> Result<(), SolveError> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(coordinate) => Err(SolveError::NonFinite {
            step,
            coordinate,
            value: x[coordinate],
        }),
        None => Ok(()),
    }
}

/// `X <- H(X)`.
pub fn jacobi_sweep<O: Operator + ?Sized>(
    state: &mut BaselineState,
    op: &O,
) -> Result<(), SolveError> {
    let step = state.sweep_count + 1;
    let next = op.eval(&state.x).map_err(domain(step, 0))?;
    ensure_finite(&next, step)?;
    state.x = next;
    state.sweep_count = step;
    Ok(())
}

/// In-place sweep in natural order: `X[i] <- H(X)[i]` for `i = 0..N`, each
/// coordinate seeing the updates before it.
///
/// With a closed-form increment the image `H(X)` is kept current through
/// increments, so a sweep costs one full evaluation plus `N` increments.
pub fn gauss_seidel_sweep<O: Operator + ?Sized>(
    state: &mut BaselineState,
    op: &O,
) -> Result<(), SolveError> {
    gs_impl(state, op, None)
}

/// [`gauss_seidel_sweep`] that checks the maintained image against a full
/// evaluation after every coordinate update.
pub fn gauss_seidel_sweep_verified<O: Operator + ?Sized>(
    state: &mut BaselineState,
    op: &O,
    tol: f64,
) -> Result<(), SolveError> {
    gs_impl(state, op, Some(tol))
}

fn gs_impl<O: Operator + ?Sized>(
    state: &mut BaselineState,
    op: &O,
    verify: Option<f64>,
) -> Result<(), SolveError> {
    let step = state.sweep_count + 1;
    let n = op.dim();
    let mut x = state.x.clone();
    if op.has_increment_form() {
        let mut image = op.eval(&x).map_err(domain(step, 0))?;
        for i in 0..n {
            let d = image[i] - x[i];
            if d != 0.0 {
                let inc = op.increment(&x, i, d).map_err(domain(step, i))?;
                x[i] += d;
                for (j, v) in inc.iter() {
                    image[j] += v;
                }
            }
            if let Some(tol) = verify {
                let full = op.eval(&x).map_err(domain(step, i))?;
                for (j, (&kept, &fresh)) in image.iter().zip(&full).enumerate() {
                    if !((kept - fresh).abs() <= tol * (1.0 + fresh.abs())) {
                        return Err(SolveError::IncrementMismatch {
                            step,
                            coordinate: i,
                            component: j,
                            closed_form: kept,
                            full_eval: fresh,
                        });
                    }
                }
            }
        }
    } else {
        for i in 0..n {
            x[i] = op.eval(&x).map_err(domain(step, i))?[i];
        }
    }
    ensure_finite(&x, step)?;
    state.x = x;
    state.sweep_count = step;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Baseline {
    Jacobi,
    GaussSeidel,
}

impl Baseline {
    pub fn label(self) -> &'static str {
        match self {
            Baseline::Jacobi => "jacobi",
            Baseline::GaussSeidel => "gauss-seidel",
        }
    }

    /// Ordering recorded in the trace's strategy column.
    pub fn ordering(self) -> &'static str {
        match self {
            Baseline::Jacobi => "simultaneous",
            Baseline::GaussSeidel => "natural",
        }
    }

    pub fn sweep<O: Operator + ?Sized>(
        self,
        state: &mut BaselineState,
        op: &O,
    ) -> Result<(), SolveError> {
        match self {
            Baseline::Jacobi => jacobi_sweep(state, op),
            Baseline::GaussSeidel => gauss_seidel_sweep(state, op),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jacobi" => Ok(Baseline::Jacobi),
            "gauss-seidel" => Ok(Baseline::GaussSeidel),
            other => Err(format!("unknown baseline `{other}`")),
        }
    }
}

/// Stop when `|H(X) - X|_inf <= tolerance` or after `max_sweeps` sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRule {
    pub tolerance: f64,
    pub max_sweeps: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub state: BaselineState,
    pub trace: Trace,
    pub converged: bool,
}

/// Runs sweeps from the problem's `x0`, sampling the error after each one.
pub fn run_baseline(
    problem: &Problem,
    method: Baseline,
    rule: SweepRule,
    metric: MetricKind,
) -> Result<BaselineRun, RunFailure> {
    let resolved = metric.resolve(problem).unwrap_or(Metric::Residual);
    let mut trace = Trace::new(method.label(), method.ordering(), None, resolved);
    let mut state = BaselineState::new(problem.x0().to_vec());
    let result = (|| {
        if !(rule.tolerance >= 0.0) || (rule.max_sweeps.is_none() && rule.tolerance == 0.0) {
            return Err(SolveError::StopRule(format!("invalid sweep rule {rule:?}")));
        }
        metric.resolve(problem)?;
        ensure_finite(&state.x, 0)?;
        let op = problem.operator();
        loop {
            let step = state.sweep_count;
            let error = error_metric(&state.x, problem, resolved)?;
            if !error.is_finite() {
                return Err(SolveError::NonFiniteMetric { step });
            }
            trace.push(step as f64, error);
            let image = op.eval(&state.x).map_err(domain(step, 0))?;
            let residual = image
                .iter()
                .zip(&state.x)
                .fold(0.0, |m: f64, (h, x)| m.max((h - x).abs()));
            if residual <= rule.tolerance {
                return Ok(true);
            }
            if rule.max_sweeps.is_some_and(|m| step >= m) {
                return Ok(false);
            }
            method.sweep(&mut state, op)?;
        }
    })();
    match result {
        Ok(converged) => Ok(BaselineRun {
            state,
            trace,
            converged,
        }),
        Err(error) => Err(RunFailure { error, trace }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Example3, SparseLinearOperator};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn sweeps_keep_the_fixed_point() {
        let xs = Example3::fixed_point().to_vec();
        for method in [Baseline::Jacobi, Baseline::GaussSeidel] {
            let mut s = BaselineState::new(xs.clone());
            method.sweep(&mut s, &Example3).unwrap();
            assert!(close(&s.x, &xs, 1e-14), "{method}: {:?}", s.x);
            assert_eq!(s.sweep_count, 1);
        }
    }

    #[test]
    fn jacobi_one_sweep() {
        let mut s = BaselineState::new(Example3::INITIAL.to_vec());
        jacobi_sweep(&mut s, &Example3).unwrap();
        assert!(close(&s.x, &[3.04939, 2.425, 1.3], 1e-5));
        assert_eq!(s.x, Example3.eval(&Example3::INITIAL).unwrap());
    }

    #[test]
    fn jacobi_zero_operator() {
        let mut s = BaselineState::new(vec![3.0, -1.0]);
        jacobi_sweep(&mut s, &SparseLinearOperator::zeros(2)).unwrap();
        assert_eq!(s.x, vec![0.0, 0.0]);
    }

    #[test]
    fn gauss_seidel_one_sweep() {
        let mut s = BaselineState::new(Example3::INITIAL.to_vec());
        gauss_seidel_sweep(&mut s, &Example3).unwrap();
        assert!(close(&s.x, &[3.04939, 2.13735, 1.29668], 1e-5), "{:?}", s.x);
        // Sequential evaluation of the partial vectors.
        let mut x = Example3::INITIAL.to_vec();
        for i in 0..3 {
            x[i] = Example3.eval(&x).unwrap()[i];
        }
        assert!(close(&s.x, &x, 1e-14));
    }

    #[test]
    fn gauss_seidel_identity() {
        let mut s = BaselineState::new(vec![1.0, 2.0, 3.0]);
        gauss_seidel_sweep(&mut s, &SparseLinearOperator::identity(3)).unwrap();
        assert_eq!(s.x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn verified_gauss_seidel_agrees() {
        let mut a = BaselineState::new(Example3::INITIAL.to_vec());
        let mut b = a.clone();
        for _ in 0..20 {
            gauss_seidel_sweep(&mut a, &Example3).unwrap();
            gauss_seidel_sweep_verified(&mut b, &Example3, 1e-12).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn gauss_seidel_reports_coordinate_on_domain_violation() {
        // X[0] <- 1 is fine; X[1] <- (1 - 20)/4 + 1 < 0 with x = 1 leaves the domain.
        let mut s = BaselineState::new(vec![0.0, 1.0, -20.0]);
        let err = gauss_seidel_sweep(&mut s, &Example3).unwrap_err();
        match err {
            SolveError::Domain {
                step, coordinate, ..
            } => {
                assert_eq!(step, 1);
                assert_eq!(coordinate, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s.x, vec![0.0, 1.0, -20.0]);
    }

    #[test]
    fn run_baseline_samples_each_sweep() {
        let rule = SweepRule {
            tolerance: 0.0,
            max_sweeps: Some(5),
        };
        let r = run_baseline(
            &Problem::example3(),
            Baseline::Jacobi,
            rule,
            MetricKind::Auto,
        )
        .unwrap();
        let xs: Vec<f64> = r
            .trace
            .samples()
            .iter()
            .map(|s| s.normalized_iteration)
            .collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(!r.converged);
        assert_eq!(r.trace.strategy, "simultaneous");
    }

    #[test]
    fn run_baseline_at_fixed_point() {
        let p = Problem::example3_from(Example3::fixed_point());
        let rule = SweepRule {
            tolerance: 1e-12,
            max_sweeps: Some(50),
        };
        for m in [Baseline::Jacobi, Baseline::GaussSeidel] {
            let r = run_baseline(&p, m, rule, MetricKind::Auto).unwrap();
            assert!(r.converged);
            assert_eq!(r.trace.samples().len(), 1);
        }
    }
}
