use super::{check_index, check_len, Operator, SparseVector};
use crate::error::OperatorError;

/// The three-dimensional nonlinear map
/// `H(x, y, z) = (sqrt(x*y) + 1, (x + z)/4 + 1, (x + y)/4)`,
/// defined for `x*y >= 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Example3;

const DEPS: [&[usize]; 3] = [&[0, 1, 2], &[0, 2], &[1]];

impl Example3 {
    /// The builtin initial condition `(4.2, 1, 1.5)`.
    pub const INITIAL: [f64; 3] = [4.2, 1.0, 1.5];

    /// Closed-form fixed point:
    /// `x = (23 + sqrt(379))/10`, `y = x/3 + 16/15`, `z = x/3 + 4/15`.
    pub fn fixed_point() -> [f64; 3] {
        let s = 23.0 + 379f64.sqrt();
        [s / 10.0, s / 30.0 + 16.0 / 15.0, s / 30.0 + 4.0 / 15.0]
    }

    fn check_domain(x: &[f64]) -> Result<(), OperatorError> {
        // Exact test, no slack.
        if x[0] * x[1] >= 0.0 {
            Ok(())
        } else {
            Err(OperatorError::Domain {
                coordinate: 0,
                point: x.to_vec(),
                reason: format!("x*y = {} < 0", x[0] * x[1]),
            })
        }
    }
}

/// `sqrt(|b|) - sqrt(|a|)` for `a`, `b` of equal sign, without cancellation.
fn sqrt_diff(a: f64, b: f64) -> f64 {
    let (ra, rb) = (a.abs().sqrt(), b.abs().sqrt());
    let den = ra + rb;
    if den == 0.0 {
        0.0
    } else {
        (b.abs() - a.abs()) / den
    }
}

impl Operator for Example3 {
    fn dim(&self) -> usize {
        3
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
        check_len(3, x.len())?;
        check_len(3, out.len())?;
        Self::check_domain(x)?;
        out[0] = (x[0] * x[1]).sqrt() + 1.0;
        out[1] = (x[0] + x[2]) / 4.0 + 1.0;
        out[2] = (x[0] + x[1]) / 4.0;
        Ok(())
    }

    fn has_increment_form(&self) -> bool {
        true
    }

    fn increment(&self, x: &[f64], i: usize, delta: f64) -> Result<SparseVector, OperatorError> {
        check_len(3, x.len())?;
        check_index(3, i)?;
        Self::check_domain(x)?;
        if delta == 0.0 {
            return Ok(SparseVector::new());
        }
        let mut moved = [x[0], x[1], x[2]];
        moved[i] += delta;
        Self::check_domain(&moved)?;

        // With x*y >= 0 on both points, sqrt(x*y) = sqrt(|x|) * sqrt(|y|).
        let quarter = delta / 4.0;
        let mut out = SparseVector::with_capacity(3);
        match i {
            0 => {
                out.push(0, x[1].abs().sqrt() * sqrt_diff(x[0], moved[0]));
                out.push(1, quarter);
                out.push(2, quarter);
            }
            1 => {
                out.push(0, x[0].abs().sqrt() * sqrt_diff(x[1], moved[1]));
                out.push(2, quarter);
            }
            _ => out.push(1, quarter),
        }
        Ok(out)
    }

    fn dependents(&self, i: usize) -> Option<&[usize]> {
        DEPS.get(i).copied()
    }
}
