//! Fixed-point maps `X -> H(X)`.
//!
//! An [`Operator`] exposes a full evaluation and a per-coordinate increment
//! `H(X + delta * e_i) - H(X)`. The increment is what the one-step-back
//! engine needs on every step; operators that know a closed form for it (and
//! which output coordinates it can touch) should override
//! [`Operator::increment`] and [`Operator::dependents`]. Otherwise the
//! default falls back to two full evaluations.

mod example3;
mod linear;
pub mod matrix_market;

pub use example3::Example3;
pub use linear::{d_iteration_step, SparseLinearOperator};

use crate::error::OperatorError;

/// A sparse vector stored as `(index, value)` pairs with distinct indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        Self {
            entries: Vec::with_capacity(cap),
        }
    }

    /// Appends an entry. Callers must not push the same index twice.
    pub fn push(&mut self, index: usize, value: f64) {
        debug_assert!(self.entries.iter().all(|&(j, _)| j != index));
        self.entries.push((index, value));
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at `index`, zero when not stored.
    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .iter()
            .find(|&&(j, _)| j == index)
            .map_or(0.0, |&(_, v)| v)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(j, v) in &self.entries {
            out[j] += v;
        }
        out
    }
}

impl FromIterator<(usize, f64)> for SparseVector {
    fn from_iter<T: IntoIterator<Item = (usize, f64)>>(iter: T) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

/// A fixed-point map on `R^N`.
///
/// Coordinates are 0-based throughout the library.
pub trait Operator: Send + Sync {
    /// Dimension `N`.
    fn dim(&self) -> usize;

    /// Writes `H(x)` into `out`. Both slices have length `N`.
    fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError>;

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
        check_len(self.dim(), x.len())?;
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Whether [`Operator::increment`] is a dedicated closed form rather than
    /// the two-evaluation fallback.
    fn has_increment_form(&self) -> bool {
        false
    }

    /// Returns `H(x + delta * e_i) - H(x)`.
    fn increment(&self, x: &[f64], i: usize, delta: f64) -> Result<SparseVector, OperatorError> {
        full_increment(self, x, i, delta).map(|full| full.delta)
    }

    /// Output coordinates that input coordinate `i` can affect, if known.
    fn dependents(&self, _i: usize) -> Option<&[usize]> {
        None
    }
}

/// An increment computed from two full evaluations, with both images kept.
#[derive(Debug, Clone)]
pub struct FullIncrement {
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    pub delta: SparseVector,
}

/// Computes `H(x + delta * e_i) - H(x)` by evaluating `H` twice.
///
/// Exact zeros are omitted from the returned sparse vector.
pub fn full_increment<O: Operator + ?Sized>(
    op: &O,
    x: &[f64],
    i: usize,
    delta: f64,
) -> Result<FullIncrement, OperatorError> {
    let n = op.dim();
    check_len(n, x.len())?;
    check_index(n, i)?;
    let before = op.eval(x)?;
    let mut moved = x.to_vec();
    moved[i] += delta;
    let after = op.eval(&moved)?;
    let delta = before
        .iter()
        .zip(&after)
        .enumerate()
        .filter_map(|(j, (b, a))| {
            let d = a - b;
            (d != 0.0).then_some((j, d))
        })
        .collect();
    Ok(FullIncrement {
        before,
        after,
        delta,
    })
}

/// Outcome of comparing an operator's increment with the two-evaluation route.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementDisagreement {
    pub component: usize,
    pub closed_form: f64,
    pub full_eval: f64,
}

/// Computes the increment both ways and checks
/// `|closed - full| <= tol * (1 + |H(x + delta * e_i)|)` per component.
///
/// On agreement returns the operator's own increment.
pub fn checked_increment<O: Operator + ?Sized>(
    op: &O,
    x: &[f64],
    i: usize,
    delta: f64,
    tol: f64,
) -> Result<Result<SparseVector, IncrementDisagreement>, OperatorError> {
    let closed = op.increment(x, i, delta)?;
    let full = full_increment(op, x, i, delta)?;
    let closed_dense = closed.to_dense(op.dim());
    let full_dense = full.delta.to_dense(op.dim());
    for (j, (&c, &f)) in closed_dense.iter().zip(&full_dense).enumerate() {
        let scale = 1.0 + full.after[j].abs();
        if !((c - f).abs() <= tol * scale) {
            return Ok(Err(IncrementDisagreement {
                component: j,
                closed_form: c,
                full_eval: f,
            }));
        }
    }
    Ok(Ok(closed))
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<(), OperatorError> {
    if expected == got {
        Ok(())
    } else {
        Err(OperatorError::Dimension { expected, got })
    }
}

pub(crate) fn check_index(dim: usize, index: usize) -> Result<(), OperatorError> {
    if index < dim {
        Ok(())
    } else {
        Err(OperatorError::CoordinateOutOfRange { index, dim })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Quadratic map with no closed-form increment.
    struct Squares;

    impl Operator for Squares {
        fn dim(&self) -> usize {
            2
        }
        fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
            out[0] = 0.25 * x[1] * x[1];
            out[1] = 0.5 * x[0];
            Ok(())
        }
    }

    #[test]
    fn fallback_increment_uses_two_evaluations() {
        let d = Squares.increment(&[1.0, 2.0], 1, 1.0).unwrap();
        assert_eq!(d.to_dense(2), vec![0.25 * 9.0 - 1.0, 0.0]);
        assert!(!Squares.has_increment_form());
        assert!(Squares.dependents(0).is_none());
    }

    #[test]
    fn zero_delta_gives_empty_increment() {
        assert!(Squares.increment(&[1.0, 2.0], 0, 0.0).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_coordinate() {
        let err = Squares.increment(&[1.0, 2.0], 2, 1.0).unwrap_err();
        assert_eq!(
            err,
            OperatorError::CoordinateOutOfRange { index: 2, dim: 2 }
        );
    }

    #[test]
    fn sparse_vector_get_and_dense() {
        let v: SparseVector = [(2, 1.5), (0, -1.0)].into_iter().collect();
        assert_eq!(v.get(2), 1.5);
        assert_eq!(v.get(1), 0.0);
        assert_eq!(v.to_dense(3), vec![-1.0, 0.0, 1.5]);
    }
}
