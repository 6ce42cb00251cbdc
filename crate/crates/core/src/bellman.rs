//! The min-max Bellman (Shapley) operator and equilibrium extraction.
//!
//! `(BS)(x) = min_u max_v Σ_y (g(u,v,x,y) + S(y))·rho(u,v,x,y)·pi(y)`.
//!
//! All sums run left to right in index order so results are
//! bit-reproducible. Only the robust (upper) value is computed: `min max`
//! is never replaced by `max min`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::model::{GameModel, ValueFunction};

/// Default tolerance for ties when extracting equilibrium sets.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

/// A pure action pair `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionPair {
    pub u: usize,
    pub v: usize,
}

impl ActionPair {
    pub const fn new(u: usize, v: usize) -> Self {
        ActionPair { u, v }
    }
}

/// Expected one-step payoff of `(u, v)` at `x` followed by continuation `s`.
#[inline]
pub fn stage_value(model: &GameModel, s: &[f64], u: usize, v: usize, x: usize) -> f64 {
    let mut acc = 0.0;
    for (((g, r), p), sy) in model
        .g_row(u, v, x)
        .iter()
        .zip(model.rho_row(u, v, x))
        .zip(model.pi())
        .zip(s)
    {
        acc += (g + sy) * r * p;
    }
    acc
}

/// Stage payoffs `h(u, v, x)` at one state, row-major in `(u, v)`.
pub fn stage_matrix(model: &GameModel, s: &[f64], x: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(model.n_u() * model.n_v());
    for u in 0..model.n_u() {
        for v in 0..model.n_v() {
            h.push(stage_value(model, s, u, v, x));
        }
    }
    h
}

fn upper_value(h: &[f64], n_v: usize) -> f64 {
    h.chunks(n_v)
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Applies the Bellman operator once.
pub fn apply_bellman(model: &GameModel, s: &[f64]) -> Result<ValueFunction> {
    model.check_value_len(s)?;
    let n_v = model.n_v();
    let out = (0..model.n_states())
        .map(|x| upper_value(&stage_matrix(model, s, x), n_v))
        .collect();
    Ok(ValueFunction(out))
}

/// `B^k s`.
pub fn iterate_bellman(model: &GameModel, s: &[f64], k: usize) -> Result<ValueFunction> {
    let mut cur = ValueFunction::from(s);
    model.check_value_len(&cur)?;
    for _ in 0..k {
        cur = apply_bellman(model, &cur)?;
    }
    Ok(cur)
}

/// Equilibrium pairs per state, sorted; the first pair at each state is the
/// canonical representative (lowest `u`, then lowest `v`).
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    pub per_state: Vec<Vec<ActionPair>>,
    pub tie_tolerance: f64,
}

impl EquilibriumSet {
    pub fn canonical(&self, x: usize) -> ActionPair {
        self.per_state[x][0]
    }

    pub fn canonical_pairs(&self) -> Vec<ActionPair> {
        (0..self.per_state.len()).map(|x| self.canonical(x)).collect()
    }

    /// States whose equilibrium set has more than one pair.
    pub fn tied_states(&self) -> Vec<usize> {
        self.per_state
            .iter()
            .enumerate()
            .filter(|(_, pairs)| pairs.len() > 1)
            .map(|(x, _)| x)
            .collect()
    }

    pub fn is_unique(&self) -> bool {
        self.per_state.iter().all(|p| p.len() == 1)
    }

    /// Same pairs at every state, regardless of the tolerance used.
    pub fn same_pairs(&self, other: &EquilibriumSet) -> bool {
        self.per_state == other.per_state
    }
}

/// Pairs where `u` attains the outer minimum within `tie_tolerance` and `v`
/// attains the inner maximum for that `u` within `tie_tolerance`. The union
/// is taken over all near-optimal `u`.
pub fn equilibrium_pairs(h: &[f64], n_v: usize, tie_tolerance: f64) -> Vec<ActionPair> {
    let row_max: Vec<f64> = h
        .chunks(n_v)
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let value = row_max.iter().copied().fold(f64::INFINITY, f64::min);
    let mut pairs = Vec::new();
    for (u, row) in h.chunks(n_v).enumerate() {
        if row_max[u] > value + tie_tolerance {
            continue;
        }
        for (v, &hv) in row.iter().enumerate() {
            if hv >= row_max[u] - tie_tolerance {
                pairs.push(ActionPair::new(u, v));
            }
        }
    }
    pairs
}

/// Extracts `E(x, S)` at every state.
pub fn equilibrium_set(model: &GameModel, s: &[f64], tie_tolerance: f64) -> Result<EquilibriumSet> {
    model.check_value_len(s)?;
    let tie_tolerance = tie_tolerance.max(0.0);
    let n_v = model.n_v();
    let per_state = (0..model.n_states())
        .map(|x| equilibrium_pairs(&stage_matrix(model, s, x), n_v, tie_tolerance))
        .collect();
    Ok(EquilibriumSet {
        per_state,
        tie_tolerance,
    })
}

/// Next-state probabilities under the canonical pair of `e` at every state.
pub fn canonical_kernel(model: &GameModel, e: &EquilibriumSet) -> Vec<Vec<f64>> {
    (0..model.n_states())
        .map(|x| {
            let p = e.canonical(x);
            model.transition_probs(p.u, p.v, x)
        })
        .collect()
}

/// Strategy schedule of a `T`-step game: entry `t` is the equilibrium set
/// used at play step `t` (t steps already played), extracted from the
/// continuation value `B^{T-t-1}(terminal)`.
pub fn strategy_schedule(
    model: &GameModel,
    terminal: &[f64],
    horizon: usize,
    tie_tolerance: f64,
) -> Result<Vec<EquilibriumSet>> {
    model.check_value_len(terminal)?;
    let mut sets = vec![None; horizon];
    let mut continuation = ValueFunction::from(terminal);
    for k in 0..horizon {
        sets[horizon - 1 - k] = Some(equilibrium_set(model, &continuation, tie_tolerance)?);
        if k + 1 < horizon {
            continuation = apply_bellman(model, &continuation)?;
        }
    }
    Ok(sets.into_iter().map(|e| e.expect("filled")).collect())
}
