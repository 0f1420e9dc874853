use std::fmt;

use crate::bench::{error_metric, normalized_iteration, Metric, MetricKind, Trace};
use crate::error::SolveError;
use crate::problem::Problem;
use crate::solver::{estimator, init_state, osb_step, osb_step_verified, SolverState};
use crate::strategies::{MaxTracker, Schedule};

/// Stop when `|F|_inf <= tolerance` or after `max_updates` coordinate updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub tolerance: f64,
    pub max_updates: Option<u64>,
}

impl StopRule {
    pub fn new(tolerance: f64, max_updates: Option<u64>) -> Self {
        Self {
            tolerance,
            max_updates,
        }
    }

    /// Budget of `iterations` normalized iterations, i.e.
    /// `floor(iterations * n)` coordinate updates.
    pub fn normalized(tolerance: f64, iterations: f64, n: usize) -> Self {
        Self::new(tolerance, Some((iterations * n as f64).floor() as u64))
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.tolerance >= 0.0) {
            return Err(SolveError::StopRule(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance
            )));
        }
        if self.max_updates.is_none() && self.tolerance == 0.0 {
            return Err(SolveError::StopRule(
                "needs a positive tolerance or an update budget".into(),
            ));
        }
        Ok(())
    }
}

/// A completed run.
#[derive(Debug, Clone)]
pub struct OsbRun {
    pub state: SolverState,
    pub trace: Trace,
    /// Whether the tolerance was met (as opposed to the budget running out).
    pub converged: bool,
}

/// A failed run with the trace recorded up to the failure.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: SolveError,
    pub trace: Trace,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} run failed: {}", self.trace.method, self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// One-step-back driver.
///
/// Samples the error of the estimator `H + F` at normalized iteration 0,
/// after every `N` coordinate updates and at termination.
#[derive(Debug, Clone, Copy)]
pub struct OsbSolver {
    stop: StopRule,
    metric: MetricKind,
    verify_tolerance: Option<f64>,
}

impl OsbSolver {
    pub fn new(stop: StopRule) -> Self {
        Self {
            stop,
            metric: MetricKind::Auto,
            verify_tolerance: None,
        }
    }

    pub fn metric(mut self, metric: MetricKind) -> Self {
        self.metric = metric;
        self
    }

    /// Cross-checks every increment against two full evaluations.
    pub fn verify_increments(mut self, tolerance: f64) -> Self {
        self.verify_tolerance = Some(tolerance);
        self
    }

    pub fn run(
        &self,
        problem: &Problem,
        schedule: &mut dyn Schedule,
    ) -> Result<OsbRun, RunFailure> {
        let metric = self.metric.resolve(problem).unwrap_or(Metric::Residual);
        let mut trace = Trace::new("osb", schedule.label(), schedule.seed(), metric);
        match self.run_into(problem, schedule, &mut trace) {
            Ok((state, converged)) => Ok(OsbRun {
                state,
                trace,
                converged,
            }),
            Err(error) => Err(RunFailure { error, trace }),
        }
    }

    fn run_into(
        &self,
        problem: &Problem,
        schedule: &mut dyn Schedule,
        trace: &mut Trace,
    ) -> Result<(SolverState, bool), SolveError> {
        self.stop.validate()?;
        self.metric.resolve(problem)?;
        let op = problem.operator();
        let n = problem.dimension();
        let mut state = init_state(problem)?;
        sample(trace, problem, &state)?;

        schedule.reset(&state);
        let mut residual = MaxTracker::new(state.fluid());
        let converged = loop {
            let (_, norm) = residual.top(state.fluid()).expect("non-empty state");
            if norm <= self.stop.tolerance {
                break true;
            }
            if self
                .stop
                .max_updates
                .is_some_and(|m| state.step_count() >= m)
            {
                break false;
            }
            let i = schedule.next_coordinate(&state);
            let delta = match self.verify_tolerance {
                None => osb_step(&mut state, op, i)?,
                Some(tol) => osb_step_verified(&mut state, op, i, tol)?,
            };
            schedule.observe(&state, i, &delta);
            residual.update(
                state.fluid(),
                std::iter::once(i).chain(delta.iter().map(|(j, _)| j)),
            );
            if state.step_count() % n as u64 == 0 {
                sample(trace, problem, &state)?;
            }
        };
        let at = normalized_iteration(state.step_count(), n);
        if trace.last().is_some_and(|s| s.normalized_iteration < at) {
            sample(trace, problem, &state)?;
        }
        Ok((state, converged))
    }
}

fn sample(trace: &mut Trace, problem: &Problem, state: &SolverState) -> Result<(), SolveError> {
    let error = error_metric(&estimator(state), problem, trace.metric)?;
    if !error.is_finite() {
        return Err(SolveError::NonFiniteMetric {
            step: state.step_count(),
        });
    }
    trace.push(
        normalized_iteration(state.step_count(), problem.dimension()),
        error,
    );
    Ok(())
}

/// Runs with the default metric and no increment cross-check.
pub fn run(
    problem: &Problem,
    schedule: &mut dyn Schedule,
    stop: StopRule,
) -> Result<OsbRun, RunFailure> {
    OsbSolver::new(stop).run(problem, schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Example3;
    use crate::solver::residual_norm;
    use crate::strategies::{Cyclic, Greedy, GreedyScan};

    #[test]
    fn starting_at_fixed_point_stops_immediately() {
        let p = Problem::example3_from(Example3::fixed_point());
        for mut s in [
            Box::new(Greedy::new()) as Box<dyn Schedule>,
            Box::new(Cyclic::new()),
        ] {
            let r = run(&p, s.as_mut(), StopRule::new(1e-12, Some(300))).unwrap();
            assert!(r.converged);
            assert_eq!(r.state.step_count(), 0);
            assert!(residual_norm(&r.state) < 1e-15);
            assert_eq!(r.trace.samples().len(), 1);
            assert_eq!(r.trace.samples()[0].normalized_iteration, 0.0);
        }
    }

    #[test]
    fn greedy_reaches_closed_form_fixed_point() {
        let r = run(
            &Problem::example3(),
            &mut Greedy::new(),
            StopRule::new(1e-12, Some(300)),
        )
        .unwrap();
        assert!(r.converged);
        let est = estimator(&r.state);
        let xs = Example3::fixed_point();
        for k in 0..3 {
            assert!((est[k] - xs[k]).abs() <= 1e-9, "{est:?}");
        }
        assert!((xs[0] - 4.246792).abs() < 1e-6);
    }

    #[test]
    fn zero_budget_returns_initial_state() {
        let p = Problem::example3();
        let r = run(&p, &mut Greedy::new(), StopRule::new(1e-12, Some(0))).unwrap();
        assert!(!r.converged);
        assert_eq!(r.state, init_state(&p).unwrap());
        assert_eq!(r.trace.samples().len(), 1);
    }

    #[test]
    fn samples_every_sweep_and_at_the_end() {
        let r = run(
            &Problem::example3(),
            &mut Greedy::new(),
            StopRule::new(0.0, Some(7)),
        )
        .unwrap();
        let xs: Vec<f64> = r
            .trace
            .samples()
            .iter()
            .map(|s| s.normalized_iteration)
            .collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 7.0 / 3.0]);
        assert_eq!(r.trace.method, "osb");
        assert_eq!(r.trace.strategy, "greedy");
        assert_eq!(r.trace.metric, Metric::Distance);
    }

    #[test]
    fn heap_greedy_matches_scan_greedy() {
        let stop = StopRule::new(0.0, Some(90));
        let a = run(&Problem::example3(), &mut Greedy::new(), stop).unwrap();
        let b = run(&Problem::example3(), &mut GreedyScan, stop).unwrap();
        assert_eq!(a.state, b.state);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn invalid_stop_rule() {
        let err = run(
            &Problem::example3(),
            &mut Greedy::new(),
            StopRule::new(0.0, None),
        )
        .unwrap_err();
        assert!(matches!(err.error, SolveError::StopRule(_)));
        let err = run(
            &Problem::example3(),
            &mut Greedy::new(),
            StopRule::new(f64::NAN, Some(3)),
        )
        .unwrap_err();
        assert!(matches!(err.error, SolveError::StopRule(_)));
    }

    #[test]
    fn domain_failure_keeps_partial_trace() {
        // y is driven negative while x > 0.
        let p = Problem::example3()
            .with_initial(vec![0.0, 1.0, -20.0])
            .unwrap();
        let err = run(&p, &mut Cyclic::new(), StopRule::new(1e-12, Some(30))).unwrap_err();
        assert!(err.error.step().is_some(), "{:?}", err.error);
        assert_eq!(err.trace.samples().len(), 1);
    }

    #[test]
    fn verified_run_matches_plain_run() {
        let stop = StopRule::new(1e-12, Some(300));
        let a = run(&Problem::example3(), &mut Greedy::new(), stop).unwrap();
        let b = OsbSolver::new(stop)
            .verify_increments(1e-10)
            .run(&Problem::example3(), &mut Greedy::new())
            .unwrap();
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn normalized_budget() {
        assert_eq!(StopRule::normalized(1e-9, 10.0, 3).max_updates, Some(30));
        assert_eq!(StopRule::normalized(1e-9, 2.5, 3).max_updates, Some(7));
    }
}
