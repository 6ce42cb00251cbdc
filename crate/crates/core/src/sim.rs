//! Brute-force finite-horizon oracle and Monte Carlo rollouts under optimal
//! play.
//!
//! Rollouts draw from ChaCha8, a counter-based stream generator; trajectory
//! `i` is seeded with `seed + i`. Next states are drawn by inverse CDF over
//! the states in index order, skipping zero-probability targets.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bellman::{strategy_schedule, ActionPair};
use crate::error::{Error, Result};
use crate::model::{GameModel, ValueFunction};
use crate::turnpike::StateDistribution;

/// Work limit `|X|·|U|·|V|·T` for [`oracle_game_value`].
pub const ORACLE_WORK_LIMIT: u128 = 10_000_000;

/// Uniform draw in `[0, 1)` with 53 random bits.
#[inline]
pub(crate) fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `T`-step worst-case game value by backward enumeration.
///
/// Deliberately does not share code with [`crate::bellman`]: expected cost
/// and expected continuation are accumulated separately, targets are summed
/// from the last state down, and the outer minimum scans `v` before `u`.
pub fn oracle_game_value(model: &GameModel, terminal: &[f64], horizon: usize) -> Result<ValueFunction> {
    let n = model.n_states();
    let (nu, nv) = (model.n_u(), model.n_v());
    let work = n as u128 * nu as u128 * nv as u128 * horizon as u128;
    if work > ORACLE_WORK_LIMIT {
        return Err(Error::GuardExceeded {
            work,
            limit: ORACLE_WORK_LIMIT,
        });
    }
    model.check_value_len(terminal)?;
    let pi = &model.states.pi;
    let mut value = terminal.to_vec();
    for _ in 0..horizon {
        let mut next = vec![0.0; n];
        for (x, out) in next.iter_mut().enumerate() {
            // payoff[v][u]
            let mut payoff = vec![vec![0.0; nu]; nv];
            for (v, col) in payoff.iter_mut().enumerate() {
                for (u, cell) in col.iter_mut().enumerate() {
                    let mut expected_cost = 0.0;
                    let mut expected_continuation = 0.0;
                    for y in (0..n).rev() {
                        let w = model.rho(u, v, x, y) * pi[y];
                        expected_cost += model.g(u, v, x, y) * w;
                        expected_continuation += value[y] * w;
                    }
                    *cell = expected_cost + expected_continuation;
                }
            }
            let mut best = f64::INFINITY;
            for u in 0..nu {
                let mut worst = f64::NEG_INFINITY;
                for col in payoff.iter() {
                    if col[u] > worst {
                        worst = col[u];
                    }
                }
                if worst < best {
                    best = worst;
                }
            }
            *out = best;
        }
        value = next;
    }
    Ok(ValueFunction(value))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    /// `x_0, …, x_T`.
    pub states: Vec<usize>,
    /// Pair played at each step `0..T`.
    pub actions: Vec<ActionPair>,
    /// `Σ_t g(u_t, v_t, x_t, x_{t+1}) + terminal(x_T)`.
    pub realized_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub samples: Vec<TrajectorySample>,
    /// `occupation[t][x]`: fraction of trajectories at `x` at time `t`.
    pub occupation: Vec<Vec<f64>>,
    pub seed: u64,
}

impl Rollout {
    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn mean_cost(&self) -> f64 {
        self.samples.iter().map(|s| s.realized_cost).sum::<f64>() / self.samples.len() as f64
    }

    /// Mean realized cost per step.
    pub fn lambda_hat(&self, horizon: usize) -> f64 {
        self.mean_cost() / horizon as f64
    }
}

fn sample_index<R: RngCore>(rng: &mut R, probs: &[f64]) -> usize {
    let draw = unit_f64(rng);
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (y, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cumulative += p;
        last_positive = Some(y);
        if draw < cumulative {
            return y;
        }
    }
    // Rounding can leave the total a hair below one.
    last_positive.expect("row has positive mass")
}

/// `n` trajectories of the `T`-step game from state `initial`, with both
/// players using the canonical equilibrium pair of the value iterates.
pub fn rollout(
    model: &GameModel,
    terminal: &[f64],
    horizon: usize,
    initial: usize,
    n: usize,
    seed: u64,
    tie_tol: f64,
) -> Result<Rollout> {
    if initial >= model.n_states() {
        return Err(Error::InvalidParameter(alloc::format!(
            "initial state {initial} out of range"
        )));
    }
    let start = StateDistribution::point(model.n_states(), initial);
    rollout_from(model, terminal, horizon, &start, n, seed, tie_tol)
}

/// Like [`rollout`], with `x_0` drawn from `initial` as the first draw of
/// each trajectory's stream.
pub fn rollout_from(
    model: &GameModel,
    terminal: &[f64],
    horizon: usize,
    initial: &StateDistribution,
    n: usize,
    seed: u64,
    tie_tol: f64,
) -> Result<Rollout> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let states = model.n_states();
    if initial.len() != states {
        return Err(Error::LengthMismatch {
            what: "initial distribution",
            expected: states,
            found: initial.len(),
        });
    }
    let schedule = strategy_schedule(model, terminal, horizon, tie_tol)?;
    let pairs: Vec<Vec<ActionPair>> = schedule.iter().map(|e| e.canonical_pairs()).collect();
    // probs[t][x] for the pair played at step t.
    let probs: Vec<Vec<Vec<f64>>> = pairs
        .iter()
        .map(|ps| {
            ps.iter()
                .enumerate()
                .map(|(x, p)| model.transition_probs(p.u, p.v, x))
                .collect()
        })
        .collect();

    let mut counts = vec![vec![0u64; states]; horizon + 1];
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let mut x = sample_index(&mut rng, initial);
        let mut path = Vec::with_capacity(horizon + 1);
        let mut actions = Vec::with_capacity(horizon);
        let mut cost = 0.0;
        path.push(x);
        counts[0][x] += 1;
        for t in 0..horizon {
            let pair = pairs[t][x];
            let y = sample_index(&mut rng, &probs[t][x]);
            cost += model.g(pair.u, pair.v, x, y);
            actions.push(pair);
            path.push(y);
            counts[t + 1][y] += 1;
            x = y;
        }
        cost += terminal[x];
        samples.push(TrajectorySample {
            states: path,
            actions,
            realized_cost: cost,
        });
    }
    let occupation = counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| c as f64 / n as f64).collect())
        .collect();
    Ok(Rollout {
        samples,
        occupation,
        seed,
    })
}
