//! Coordinate schedules: the order in which coordinates are updated.
//!
//! All indices are 0-based. A schedule is driven by the run loop, which calls
//! [`Schedule::reset`] once with the initial state, then alternates
//! [`Schedule::next_coordinate`] with [`Schedule::observe`] after every step.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operators::SparseVector;
use crate::solver::SolverState;

pub trait Schedule: Send {
    /// Name recorded in traces.
    fn label(&self) -> &'static str;

    /// Seed recorded in traces, for randomized schedules.
    fn seed(&self) -> Option<u64> {
        None
    }

    fn reset(&mut self, _state: &SolverState) {}

    /// Chooses the next coordinate. `state.dim()` must be at least 1.
    fn next_coordinate(&mut self, state: &SolverState) -> usize;

    /// Coordinate `i` was just updated; the fluid changed at `i` and at the
    /// indices of `delta`.
    fn observe(&mut self, _state: &SolverState, _i: usize, _delta: &SparseVector) {}
}

/// `0, 1, ..., N-1, 0, 1, ...`
#[derive(Debug, Clone, Default)]
pub struct Cyclic {
    cursor: usize,
}

impl Cyclic {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Schedule for Cyclic {
    fn label(&self) -> &'static str {
        "cyclic"
    }

    fn reset(&mut self, _state: &SolverState) {
        self.cursor = 0;
    }

    fn next_coordinate(&mut self, state: &SolverState) -> usize {
        let i = self.cursor % state.dim();
        self.cursor = (i + 1) % state.dim();
        i
    }
}

/// Uniform draws from a seeded ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct RandomOrder {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomOrder {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Schedule for RandomOrder {
    fn label(&self) -> &'static str {
        "random"
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn next_coordinate(&mut self, state: &SolverState) -> usize {
        self.rng.gen_range(0..state.dim())
    }
}

/// Index of the largest `|v[i]|`, lowest index on ties. `None` when empty.
pub fn argmax_abs(v: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, x) in v.iter().enumerate() {
        let a = x.abs();
        match best {
            Some((_, b)) if a <= b => {}
            _ => best = Some((i, a)),
        }
    }
    best.map(|(i, _)| i)
}

/// Greedy choice by a full scan of the fluid.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyScan;

impl Schedule for GreedyScan {
    fn label(&self) -> &'static str {
        "greedy"
    }

    fn next_coordinate(&mut self, state: &SolverState) -> usize {
        argmax_abs(state.fluid()).expect("non-empty state")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    // Bit pattern of a non-negative finite f64; orders like the value.
    key: u64,
    index: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.key, Reverse(self.index)).cmp(&(other.key, Reverse(other.index)))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn key_of(x: f64) -> u64 {
    x.abs().to_bits()
}

/// Lazy max-heap over `|v[i]|` with lowest-index tie breaking.
///
/// Entries go stale when a value changes; every change pushes a fresh entry
/// and stale ones are dropped when they surface. The heap is rebuilt when
/// stale entries pile up.
#[derive(Debug, Clone, Default)]
pub struct MaxTracker {
    heap: BinaryHeap<Entry>,
    dim: usize,
}

impl MaxTracker {
    pub fn new(values: &[f64]) -> Self {
        let mut t = Self::default();
        t.rebuild(values);
        t
    }

    pub fn rebuild(&mut self, values: &[f64]) {
        self.dim = values.len();
        self.heap = values
            .iter()
            .enumerate()
            .map(|(index, &x)| Entry {
                key: key_of(x),
                index,
            })
            .collect();
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Records new values at `indices`.
    pub fn update<I: IntoIterator<Item = usize>>(&mut self, values: &[f64], indices: I) {
        if self.heap.len() > 4 * self.dim + 16 {
            self.rebuild(values);
            return;
        }
        for index in indices {
            self.heap.push(Entry {
                key: key_of(values[index]),
                index,
            });
        }
    }

    /// Current `(argmax, max |v|)`. `values` must be the vector the tracker
    /// has been kept in sync with.
    pub fn top(&mut self, values: &[f64]) -> Option<(usize, f64)> {
        while let Some(&e) = self.heap.peek() {
            if key_of(values[e.index]) == e.key {
                return Some((e.index, f64::from_bits(e.key)));
            }
            self.heap.pop();
        }
        None
    }
}

/// Greedy choice (largest `|F[i]|`, lowest index on ties) backed by a
/// [`MaxTracker`] refreshed only where the fluid changed.
#[derive(Debug, Clone, Default)]
pub struct Greedy {
    tracker: Option<MaxTracker>,
}

impl Greedy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Schedule for Greedy {
    fn label(&self) -> &'static str {
        "greedy"
    }

    fn reset(&mut self, state: &SolverState) {
        self.tracker = Some(MaxTracker::new(state.fluid()));
    }

    fn next_coordinate(&mut self, state: &SolverState) -> usize {
        let fluid = state.fluid();
        let tracker = match &mut self.tracker {
            Some(t) if t.dim() == fluid.len() => t,
            slot => slot.insert(MaxTracker::new(fluid)),
        };
        tracker.top(fluid).expect("non-empty state").0
    }

    fn observe(&mut self, state: &SolverState, i: usize, delta: &SparseVector) {
        if let Some(t) = &mut self.tracker {
            t.update(
                state.fluid(),
                std::iter::once(i).chain(delta.iter().map(|(j, _)| j)),
            );
        }
    }
}

/// Schedule selector used by the harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Cyclic,
    Greedy,
    Random,
}

impl StrategyKind {
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Cyclic => "cyclic",
            StrategyKind::Greedy => "greedy",
            StrategyKind::Random => "random",
        }
    }

    /// A fresh schedule; `seed` is only used by [`StrategyKind::Random`].
    pub fn build(self, seed: u64) -> Box<dyn Schedule> {
        match self {
            StrategyKind::Cyclic => Box::new(Cyclic::new()),
            StrategyKind::Greedy => Box::new(Greedy::new()),
            StrategyKind::Random => Box::new(RandomOrder::new(seed)),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cyclic" => Ok(StrategyKind::Cyclic),
            "greedy" => Ok(StrategyKind::Greedy),
            "random" => Ok(StrategyKind::Random),
            other => Err(format!(
                "unknown strategy `{other}` (expected cyclic, greedy or random)"
            )),
        }
    }
}
