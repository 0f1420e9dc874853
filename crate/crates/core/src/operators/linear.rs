use super::{check_index, check_len, Operator, SparseVector};
use crate::error::{MatrixError, OperatorError, SolveError};
use crate::solver::SolverState;

/// Square sparse matrix `P` acting as `X -> P X`, stored by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLinearOperator {
    dim: usize,
    /// `columns[c]` holds `(row, value)` pairs sorted by row.
    columns: Vec<Vec<(usize, f64)>>,
    /// Row indices of each column, for [`Operator::dependents`].
    rows: Vec<Vec<usize>>,
}

impl SparseLinearOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            columns: vec![Vec::new(); dim],
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0))).expect("identity is valid")
    }

    /// Builds from `(row, col, value)` triplets with 0-based indices.
    ///
    /// Explicit zeros are kept as structural entries.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut columns = vec![Vec::new(); dim];
        for (row, col, value) in triplets {
            if row >= dim || col >= dim {
                return Err(MatrixError::OutOfBounds { row, col, dim });
            }
            if !value.is_finite() {
                return Err(MatrixError::NonFinite { row, col, value });
            }
            columns[col].push((row, value));
        }
        for (col, entries) in columns.iter_mut().enumerate() {
            entries.sort_by_key(|&(r, _)| r);
            if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(MatrixError::Duplicate { row: w[0].0, col });
            }
        }
        let rows = columns
            .iter()
            .map(|c| c.iter().map(|&(r, _)| r).collect())
            .collect();
        Ok(Self { dim, columns, rows })
    }

    /// `(row, value)` pairs of column `col`, sorted by row.
    pub fn column(&self, col: usize) -> &[(usize, f64)] {
        &self.columns[col]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }
}

impl Operator for SparseLinearOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
        check_len(self.dim, x.len())?;
        check_len(self.dim, out.len())?;
        out.fill(0.0);
        for (col, &xc) in self.columns.iter().zip(x) {
            if xc != 0.0 {
                for &(r, v) in col {
                    out[r] += v * xc;
                }
            }
        }
        Ok(())
    }

    fn has_increment_form(&self) -> bool {
        true
    }

    fn increment(&self, x: &[f64], i: usize, delta: f64) -> Result<SparseVector, OperatorError> {
        check_len(self.dim, x.len())?;
        check_index(self.dim, i)?;
        if delta == 0.0 {
            return Ok(SparseVector::new());
        }
        Ok(self.columns[i]
            .iter()
            .map(|&(r, v)| (r, delta * v))
            .collect())
    }

    fn dependents(&self, i: usize) -> Option<&[usize]> {
        self.rows.get(i).map(Vec::as_slice)
    }
}

/// Linear specialization of the one-step-back update (D-iteration): moves
/// `f = F[i]` into `H[i]`, clears `F[i]`, then diffuses `f` along column `i`
/// of `P`, touching only that column's nonzeros.
pub fn d_iteration_step(
    state: &mut SolverState,
    i: usize,
    p: &SparseLinearOperator,
) -> Result<(), SolveError> {
    let n = state.dim();
    if i >= n {
        return Err(SolveError::CoordinateOutOfRange { index: i, dim: n });
    }
    if p.dim != n {
        return Err(SolveError::Domain {
            step: state.step_count + 1,
            coordinate: i,
            source: OperatorError::Dimension {
                expected: p.dim,
                got: n,
            },
        });
    }
    let step = state.step_count + 1;
    let f = state.fluid[i];
    if f == 0.0 {
        state.step_count = step;
        return Ok(());
    }
    let absorbed = state.history[i] + f;
    if !absorbed.is_finite() {
        return Err(SolveError::NonFinite {
            step,
            coordinate: i,
            value: absorbed,
        });
    }
    for &(r, v) in &p.columns[i] {
        let base = if r == i { 0.0 } else { state.fluid[r] };
        let value = base + f * v;
        if !value.is_finite() {
            return Err(SolveError::NonFinite {
                step,
                coordinate: r,
                value,
            });
        }
    }
    state.history[i] = absorbed;
    state.fluid[i] = 0.0;
    for &(r, v) in &p.columns[i] {
        state.fluid[r] += f * v;
    }
    state.step_count = step;
    Ok(())
}
