//! Random problem generators for property tests and benchmarks.

use rand::Rng;

use crate::operators::SparseLinearOperator;
use crate::solver::SolverState;

/// Random nonnegative `n x n` matrix whose column sums lie in `[0.5, 0.95]`
/// (empty columns excepted). Each entry is present with probability
/// `density`.
pub fn random_substochastic<R: Rng + ?Sized>(
    n: usize,
    density: f64,
    rng: &mut R,
) -> SparseLinearOperator {
    let mut triplets = Vec::new();
    for col in 0..n {
        let mut entries = Vec::new();
        for row in 0..n {
            if rng.gen_bool(density) {
                entries.push((row, rng.gen_range(0.01..1.0)));
            }
        }
        let sum: f64 = entries.iter().map(|e| e.1).sum();
        if sum > 0.0 {
            let target = rng.gen_range(0.5..0.95);
            for e in &mut entries {
                e.1 *= target / sum;
            }
        }
        triplets.extend(entries.into_iter().map(|(row, v)| (row, col, v)));
    }
    SparseLinearOperator::from_triplets(n, triplets).expect("generated entries are valid")
}

/// State with history and fluid entries uniform in `[-1, 1)`.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SolverState {
    let mut draw = || {
        (0..n)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect::<Vec<f64>>()
    };
    let history = draw();
    let fluid = draw();
    SolverState::from_parts(history, fluid).expect("finite")
}

/// A point of the three-dimensional example's domain (`x*y >= 0`) with
/// `x`, `y` in `(0.1, 10)`, mirrored to the negative quadrant one time in
/// four.
pub fn random_example3_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let x: f64 = rng.gen_range(0.1..10.0);
    let y: f64 = rng.gen_range(0.1..10.0);
    let z: f64 = rng.gen_range(-10.0..10.0);
    if rng.gen_ratio(1, 4) {
        [-x, -y, z]
    } else {
        [x, y, z]
    }
}
