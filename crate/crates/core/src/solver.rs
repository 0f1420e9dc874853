//! One-step-back state and step.
//!
//! The state holds two vectors: the history `H` (values absorbed so far) and
//! the residual fluid `F` (corrections not yet absorbed). Starting from
//! `H_0 = X_0` and `F_0 = H(X_0) - X_0`, a step on coordinate `i` moves
//! `F[i]` into `H[i]`, zeroes `F[i]` and adds the consequence of that move,
//! `H(H_n) - H(H_{n-1})`, to `F`. Every reachable state therefore satisfies
//! `H_n + F_n = H(H_n)`, which makes `H_n + F_n` the natural estimate.

use crate::error::SolveError;
use crate::operators::{checked_increment, Operator, SparseVector};
use crate::problem::Problem;

/// History and fluid vectors plus the number of coordinate updates applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub(crate) history: Vec<f64>,
    pub(crate) fluid: Vec<f64>,
    pub(crate) step_count: u64,
}

impl SolverState {
    /// Builds a state from raw vectors, with `step_count = 0`.
    ///
    /// Panics if the lengths differ. Does not check the conservation identity.
    pub fn from_parts(history: Vec<f64>, fluid: Vec<f64>) -> Result<Self, SolveError> {
        assert_eq!(
            history.len(),
            fluid.len(),
            "history and fluid lengths differ"
        );
        check_finite(&history, 0)?;
        check_finite(&fluid, 0)?;
        Ok(Self {
            history,
            fluid,
            step_count: 0,
        })
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn fluid(&self) -> &[f64] {
        &self.fluid
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn dim(&self) -> usize {
        self.history.len()
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.history, self.fluid)
    }
}

fn check_finite(v: &[f64], step: u64) -> Result<(), SolveError> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(coordinate) => Err(SolveError::NonFinite {
            step,
            coordinate,
            value: v[coordinate],
        }),
        None => Ok(()),
    }
}

/// `H_0 = X_0`, `F_0 = H(X_0) - X_0`.
pub fn init_state(problem: &Problem) -> Result<SolverState, SolveError> {
    let x0 = problem.x0().to_vec();
    check_finite(&x0, 0)?;
    let image = problem
        .operator()
        .eval(&x0)
        .map_err(|source| SolveError::Domain {
            step: 0,
            coordinate: domain_coordinate(&source),
            source,
        })?;
    let fluid: Vec<f64> = image.iter().zip(&x0).map(|(h, x)| h - x).collect();
    check_finite(&fluid, 0)?;
    Ok(SolverState {
        history: x0,
        fluid,
        step_count: 0,
    })
}

fn domain_coordinate(err: &crate::error::OperatorError) -> usize {
    match err {
        crate::error::OperatorError::Domain { coordinate, .. } => *coordinate,
        _ => 0,
    }
}

/// Applies one update on coordinate `i` (0-based) and returns the increment
/// `H(H') - H(H)` that was added to the fluid.
///
/// The increment comes from [`Operator::increment`]. On error the state is
/// left untouched.
pub fn osb_step<O: Operator + ?Sized>(
    state: &mut SolverState,
    op: &O,
    i: usize,
) -> Result<SparseVector, SolveError> {
    step_impl(state, op, i, None)
}

/// Like [`osb_step`], but also recomputes the increment with two full
/// evaluations and fails with [`SolveError::IncrementMismatch`] unless every
/// component agrees within `tol * (1 + |H(H')_j|)`.
pub fn osb_step_verified<O: Operator + ?Sized>(
    state: &mut SolverState,
    op: &O,
    i: usize,
    tol: f64,
) -> Result<SparseVector, SolveError> {
    step_impl(state, op, i, Some(tol))
}

fn step_impl<O: Operator + ?Sized>(
    state: &mut SolverState,
    op: &O,
    i: usize,
    verify: Option<f64>,
) -> Result<SparseVector, SolveError> {
    let n = state.dim();
    if i >= n {
        return Err(SolveError::CoordinateOutOfRange { index: i, dim: n });
    }
    let step = state.step_count + 1;
    let transfer = state.fluid[i];
    if transfer == 0.0 {
        state.step_count = step;
        return Ok(SparseVector::new());
    }

    let domain = |source| SolveError::Domain {
        step,
        coordinate: i,
        source,
    };
    let delta = match verify {
        None => op.increment(&state.history, i, transfer).map_err(domain)?,
        Some(tol) => checked_increment(op, &state.history, i, transfer, tol)
            .map_err(domain)?
            .map_err(|d| SolveError::IncrementMismatch {
                step,
                coordinate: i,
                component: d.component,
                closed_form: d.closed_form,
                full_eval: d.full_eval,
            })?,
    };

    let absorbed = state.history[i] + transfer;
    if !absorbed.is_finite() {
        return Err(SolveError::NonFinite {
            step,
            coordinate: i,
            value: absorbed,
        });
    }
    let mut updated = Vec::with_capacity(delta.len());
    for (j, d) in delta.iter() {
        if j >= n {
            return Err(SolveError::CoordinateOutOfRange { index: j, dim: n });
        }
        let base = if j == i { 0.0 } else { state.fluid[j] };
        let value = base + d;
        if !value.is_finite() {
            return Err(SolveError::NonFinite {
                step,
                coordinate: j,
                value,
            });
        }
        updated.push((j, value));
    }

    state.history[i] = absorbed;
    state.fluid[i] = 0.0;
    for (j, value) in updated {
        state.fluid[j] = value;
    }
    state.step_count = step;
    Ok(delta)
}

/// `H + F`, equal to `H(H)` on every reachable state.
pub fn estimator(state: &SolverState) -> Vec<f64> {
    state
        .history
        .iter()
        .zip(&state.fluid)
        .map(|(h, f)| h + f)
        .collect()
}

/// `|F|_inf`.
pub fn residual_norm(state: &SolverState) -> f64 {
    state.fluid.iter().fold(0.0, |m, f| m.max(f.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Example3, SparseLinearOperator};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn init_at_fixed_point_has_no_fluid() {
        let p = Problem::example3_from(Example3::fixed_point());
        let s = init_state(&p).unwrap();
        assert!(residual_norm(&s) < 1e-15);
        assert_eq!(s.step_count(), 0);
    }

    #[test]
    fn init_example3() {
        let s = init_state(&Problem::example3()).unwrap();
        assert_eq!(s.history(), &[4.2, 1.0, 1.5]);
        assert!(
            close(s.fluid(), &[-1.15061, 1.425, -0.2], 1e-5),
            "{:?}",
            s.fluid()
        );
        assert!((residual_norm(&s) - 1.425).abs() < 1e-12);
        assert!(close(&estimator(&s), &[3.04939, 2.425, 1.3], 1e-5));
    }

    #[test]
    fn init_zero_operator() {
        let p = Problem::new(SparseLinearOperator::zeros(2), vec![1.0, 1.0]).unwrap();
        assert_eq!(init_state(&p).unwrap().fluid(), &[-1.0, -1.0]);
    }

    #[test]
    fn init_outside_domain() {
        let p = Problem::new(Example3, vec![-1.0, 1.0, 0.0]).unwrap();
        match init_state(&p).unwrap_err() {
            SolveError::Domain {
                step, coordinate, ..
            } => assert_eq!((step, coordinate), (0, 0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_on_y_from_initial_condition() {
        let mut s = init_state(&Problem::example3()).unwrap();
        osb_step(&mut s, &Example3, 1).unwrap();
        assert_eq!(s.history(), &[4.2, 2.425, 1.5]);
        // Reference from an independent two-evaluation computation.
        assert!(
            close(s.fluid(), &[-0.008605320553410678, 0.0, 0.15625], 1e-12),
            "{:?}",
            s.fluid()
        );
        assert_eq!(s.step_count(), 1);
        let est = estimator(&s);
        assert!(close(&est, &[4.1913946794465895, 2.425, 1.65625], 1e-12));
        let image = Example3.eval(&[4.2, 2.425, 1.5]).unwrap();
        assert!(close(&est, &image, 1e-10));
    }

    #[test]
    fn zero_fluid_step_only_counts() {
        let mut s = SolverState::from_parts(vec![1.0, 2.0, 3.0], vec![0.5, 0.0, 0.1]).unwrap();
        let before = s.clone();
        let d = osb_step(&mut s, &Example3, 1).unwrap();
        assert!(d.is_empty());
        assert_eq!(s.history(), before.history());
        assert_eq!(s.fluid(), before.fluid());
        assert_eq!(s.step_count(), 1);
    }

    #[test]
    fn out_of_range_coordinate_is_usage_error() {
        let mut s = init_state(&Problem::example3()).unwrap();
        assert_eq!(
            osb_step(&mut s, &Example3, 3).unwrap_err(),
            SolveError::CoordinateOutOfRange { index: 3, dim: 3 }
        );
    }

    #[test]
    fn domain_violation_leaves_state_untouched() {
        // x = 0.5, y = 1, F[x] = -1 would move x to -0.5 with y > 0.
        let mut s = SolverState::from_parts(vec![0.5, 1.0, 0.0], vec![-1.0, 0.0, 0.0]).unwrap();
        let before = s.clone();
        match osb_step(&mut s, &Example3, 0).unwrap_err() {
            SolveError::Domain {
                step, coordinate, ..
            } => assert_eq!((step, coordinate), (1, 0)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s, before);
    }

    #[test]
    fn overflow_is_reported_as_non_finite() {
        let op = SparseLinearOperator::from_triplets(1, [(0, 0, 1e300)]).unwrap();
        let mut s = SolverState::from_parts(vec![0.0], vec![1e10]).unwrap();
        assert!(matches!(
            osb_step(&mut s, &op, 0).unwrap_err(),
            SolveError::NonFinite {
                step: 1,
                coordinate: 0,
                ..
            }
        ));
    }

    #[test]
    fn from_parts_rejects_nan() {
        assert!(SolverState::from_parts(vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn residual_norm_is_max_abs() {
        let s = SolverState::from_parts(vec![0.0, 0.0], vec![-3.0, 2.0]).unwrap();
        assert_eq!(residual_norm(&s), 3.0);
        let z = SolverState::from_parts(vec![1.0], vec![0.0]).unwrap();
        assert_eq!(residual_norm(&z), 0.0);
        assert_eq!(estimator(&z), vec![1.0]);
    }

    #[test]
    fn verified_step_matches_plain_step() {
        let mut a = init_state(&Problem::example3()).unwrap();
        let mut b = a.clone();
        for i in [1, 0, 2, 0, 1] {
            osb_step(&mut a, &Example3, i).unwrap();
            osb_step_verified(&mut b, &Example3, i, 1e-10).unwrap();
        }
        assert_eq!(a, b);
    }
}
