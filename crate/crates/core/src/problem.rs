use std::fmt;
use std::sync::Arc;

use crate::error::ProblemError;
use crate::operators::{Example3, Operator};

/// Largest accepted `|H(X*) - X*|_inf` for a claimed fixed point.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-9;

/// A fixed-point problem: an operator, an initial vector and, optionally, the
/// exact solution used for error measurement.
///
/// Cloning is cheap; the operator is shared.
#[derive(Clone)]
pub struct Problem {
    operator: Arc<dyn Operator>,
    x0: Vec<f64>,
    known_fixed_point: Option<Vec<f64>>,
}

impl Problem {
    pub fn new<O: Operator + 'static>(operator: O, x0: Vec<f64>) -> Result<Self, ProblemError> {
        Self::from_shared(Arc::new(operator), x0)
    }

    pub fn from_shared(operator: Arc<dyn Operator>, x0: Vec<f64>) -> Result<Self, ProblemError> {
        let n = operator.dim();
        if n == 0 {
            return Err(ProblemError::EmptyDimension);
        }
        if x0.len() != n {
            return Err(ProblemError::InitialLength {
                expected: n,
                got: x0.len(),
            });
        }
        Ok(Self {
            operator,
            x0,
            known_fixed_point: None,
        })
    }

    /// Attaches the exact solution after checking it really is fixed.
    pub fn with_fixed_point(mut self, fixed_point: Vec<f64>) -> Result<Self, ProblemError> {
        let n = self.dimension();
        if fixed_point.len() != n {
            return Err(ProblemError::FixedPointLength {
                expected: n,
                got: fixed_point.len(),
            });
        }
        let image = self.operator.eval(&fixed_point)?;
        let residual = image
            .iter()
            .zip(&fixed_point)
            .map(|(h, x)| (h - x).abs())
            .fold(0.0, f64::max);
        if !(residual <= FIXED_POINT_TOLERANCE) {
            return Err(ProblemError::NotAFixedPoint {
                residual,
                tolerance: FIXED_POINT_TOLERANCE,
            });
        }
        self.known_fixed_point = Some(fixed_point);
        Ok(self)
    }

    /// The builtin three-dimensional example from `(4.2, 1, 1.5)`.
    pub fn example3() -> Self {
        Self::example3_from(Example3::INITIAL)
    }

    /// The builtin three-dimensional example from a custom start.
    pub fn example3_from(x0: [f64; 3]) -> Self {
        Self::new(Example3, x0.to_vec())
            .and_then(|p| p.with_fixed_point(Example3::fixed_point().to_vec()))
            .expect("builtin example is well formed")
    }

    /// Same operator and fixed point, different start.
    pub fn with_initial(&self, x0: Vec<f64>) -> Result<Self, ProblemError> {
        if x0.len() != self.dimension() {
            return Err(ProblemError::InitialLength {
                expected: self.dimension(),
                got: x0.len(),
            });
        }
        Ok(Self {
            operator: Arc::clone(&self.operator),
            x0,
            known_fixed_point: self.known_fixed_point.clone(),
        })
    }

    pub fn operator(&self) -> &dyn Operator {
        self.operator.as_ref()
    }

    pub fn shared_operator(&self) -> &Arc<dyn Operator> {
        &self.operator
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn known_fixed_point(&self) -> Option<&[f64]> {
        self.known_fixed_point.as_deref()
    }

    pub fn dimension(&self) -> usize {
        self.operator.dim()
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("dimension", &self.dimension())
            .field("x0", &self.x0)
            .field("known_fixed_point", &self.known_fixed_point)
            .finish()
    }
}
