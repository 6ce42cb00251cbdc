//! Early turnpike (strategy sets) and middle turnpike (state distributions)
//! checks for long finite-horizon games.
//!
//! Time indexing: `t` counts play steps already taken in a `T`-step game.
//! The strategies used at step `t < T` are extracted from the continuation
//! value `V_{T−t−1} = B^{T−t−1}(terminal)`; see
//! [`crate::bellman::strategy_schedule`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::bellman::{canonical_kernel, equilibrium_set, strategy_schedule, ActionPair, EquilibriumSet};
use crate::error::{Error, Result, Warning};
use crate::model::GameModel;
use crate::quotient::sup_norm;
use crate::sim::unit_f64;

/// Mass tolerance for probability vectors.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Power-iteration cap for [`stationary_distribution`].
pub const POWER_ITERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution(Vec<f64>);

impl StateDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if let Some(x) = probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "probability at state {x} is {}",
                probs[x]
            )));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("total mass {mass} ≠ 1")));
        }
        Ok(StateDistribution(probs))
    }

    pub fn uniform(n: usize) -> Self {
        StateDistribution(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, x: usize) -> Self {
        let mut p = vec![0.0; n];
        p[x] = 1.0;
        StateDistribution(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self · P` for a row-stochastic `kernel[x][y]`.
    pub fn step(&self, kernel: &[Vec<f64>]) -> StateDistribution {
        let n = self.0.len();
        let mut next = vec![0.0; n];
        for (q, row) in self.0.iter().zip(kernel) {
            for (acc, p) in next.iter_mut().zip(row) {
                *acc += q * p;
            }
        }
        StateDistribution(next)
    }
}

impl Deref for StateDistribution {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `½ Σ_x |p[x] − q[x]|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            what: "distribution",
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

fn pair_distance(model: &GameModel, a: ActionPair, b: ActionPair) -> f64 {
    let actions = &model.actions;
    if !actions.has_coords() {
        return if a == b { 0.0 } else { 1.0 };
    }
    let component = |coords: &Option<Vec<Vec<f64>>>, i: usize, j: usize| -> f64 {
        match coords {
            Some(c) => c[i]
                .iter()
                .zip(&c[j])
                .map(|(p, q)| (p - q) * (p - q))
                .sum(),
            None if i == j => 0.0,
            None => 1.0,
        }
    };
    libm::sqrt(component(&actions.u_coords, a.u, b.u) + component(&actions.v_coords, a.v, b.v))
}

fn hausdorff(model: &GameModel, a: &[ActionPair], b: &[ActionPair]) -> f64 {
    let directed = |from: &[ActionPair], to: &[ActionPair]| {
        from.iter()
            .map(|&p| {
                to.iter()
                    .map(|&q| pair_distance(model, p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b).max(directed(b, a)),
    }
}

/// Maximum over states of the Hausdorff distance between the per-state
/// pair sets. The ground metric is discrete unless the model carries action
/// coordinates, in which case it is Euclidean on the concatenated
/// `(u, v)` coordinates; a side without coordinates contributes a 0/1 term.
pub fn strategy_set_distance(e1: &EquilibriumSet, e2: &EquilibriumSet, model: &GameModel) -> f64 {
    e1.per_state
        .iter()
        .zip(&e2.per_state)
        .map(|(a, b)| hausdorff(model, a, b))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// Distances between equilibrium sets; one entry per play step `0..T`.
    Strategy,
    /// Total variation between `Q(t)` and `Q*`; one entry per `t = 0..=T`.
    Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnpikeProfile {
    pub kind: ProfileKind,
    pub horizon: usize,
    pub per_step_distance: Vec<f64>,
    pub threshold: f64,
    /// Extracted window `[a, b]`, inclusive, or `None` when empty.
    pub window: Option<(usize, usize)>,
    /// Entry/exit length `M`; `None` when no admissible `M` exists.
    pub m: Option<usize>,
}

impl TurnpikeProfile {
    pub fn in_window(&self, t: usize) -> bool {
        self.window.is_some_and(|(a, b)| a <= t && t <= b)
    }

    pub fn max_distance_in_window(&self) -> Option<f64> {
        let (a, b) = self.window?;
        Some(
            self.per_step_distance[a..=b]
                .iter()
                .copied()
                .fold(0.0, f64::max),
        )
    }
}

/// Early turnpike: distance of `E(V_{T−t−1})` to `E(s*)` at each play step
/// `t < T`. `M` is the smallest value with `distance[t] ≤ ε` for all
/// `t < T − M`; the window is the conforming prefix `[0, T − M − 1]`.
pub fn early_turnpike_profile(
    model: &GameModel,
    terminal: &[f64],
    s_star: &[f64],
    horizon: usize,
    epsilon: f64,
    tie_tol: f64,
) -> Result<TurnpikeProfile> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let e_star = equilibrium_set(model, s_star, tie_tol)?;
    let schedule = strategy_schedule(model, terminal, horizon, tie_tol)?;
    let per_step_distance: Vec<f64> = schedule
        .iter()
        .map(|e| strategy_set_distance(e, &e_star, model))
        .collect();
    let prefix = per_step_distance
        .iter()
        .take_while(|d| **d <= epsilon)
        .count();
    Ok(TurnpikeProfile {
        kind: ProfileKind::Strategy,
        horizon,
        per_step_distance,
        threshold: epsilon,
        window: (prefix > 0).then(|| (0, prefix - 1)),
        m: Some(horizon - prefix),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stationary {
    pub distribution: StateDistribution,
    pub iterations: usize,
    pub warnings: Vec<Warning>,
}

/// Stationary distribution of the chain driven by the canonical pairs of
/// `e_star`, by power iteration from the uniform distribution. Stops once
/// `tv(Q·P*, Q) ≤ tol` and returns the last iterate.
pub fn stationary_distribution(
    model: &GameModel,
    e_star: &EquilibriumSet,
    tol: f64,
) -> Result<Stationary> {
    let warnings = e_star
        .tied_states()
        .into_iter()
        .map(|state| Warning::TiedEquilibrium { state })
        .collect();
    let kernel = canonical_kernel(model, e_star);
    let mut q = StateDistribution::uniform(model.n_states());
    for iterations in 1..=POWER_ITERATION_CAP {
        let next = q.step(&kernel);
        let moved = tv_distance(&next, &q)?;
        q = next;
        if moved <= tol {
            return Ok(Stationary {
                distribution: q,
                iterations,
                warnings,
            });
        }
    }
    let residual = tv_distance(&q.step(&kernel), &q)?;
    Err(Error::NoConvergence {
        iterations: POWER_ITERATION_CAP,
        residual,
        best: q.into_inner().into(),
    })
}

/// State distributions `Q(0..=T)` under the canonical pairs of a strategy
/// schedule.
pub fn propagate(
    model: &GameModel,
    schedule: &[EquilibriumSet],
    initial: &StateDistribution,
) -> Vec<StateDistribution> {
    let mut out = Vec::with_capacity(schedule.len() + 1);
    out.push(initial.clone());
    for e in schedule {
        let kernel = canonical_kernel(model, e);
        let next = out.last().expect("nonempty").step(&kernel);
        out.push(next);
    }
    out
}

/// Middle turnpike: `tv(Q(t), Q*)` for `t = 0..=T` with `Q(0) = initial`.
/// `M` is the smallest value such that every `t ∈ [M, T − M]` is within
/// `epsilon`.
pub fn middle_turnpike_profile(
    model: &GameModel,
    terminal: &[f64],
    q_star: &StateDistribution,
    horizon: usize,
    initial: &StateDistribution,
    epsilon: f64,
    tie_tol: f64,
) -> Result<(TurnpikeProfile, Vec<StateDistribution>)> {
    if initial.len() != model.n_states() || q_star.len() != model.n_states() {
        return Err(Error::LengthMismatch {
            what: "distribution",
            expected: model.n_states(),
            found: if initial.len() != model.n_states() {
                initial.len()
            } else {
                q_star.len()
            },
        });
    }
    let schedule = strategy_schedule(model, terminal, horizon, tie_tol)?;
    let distributions = propagate(model, &schedule, initial);
    let per_step_distance = distributions
        .iter()
        .map(|q| tv_distance(q, q_star))
        .collect::<Result<Vec<f64>>>()?;
    let ok: Vec<bool> = per_step_distance.iter().map(|d| *d <= epsilon).collect();
    let m = (0..=horizon / 2).find(|&m| ok[m..=horizon - m].iter().all(|b| *b));
    let profile = TurnpikeProfile {
        kind: ProfileKind::Distribution,
        horizon,
        per_step_distance,
        threshold: epsilon,
        window: m.map(|m| (m, horizon - m)),
        m,
    };
    Ok((profile, distributions))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityRow {
    pub magnitude: f64,
    /// Max over states and trials of the TV distance between equilibrium
    /// kernels at `s* + p` and at `s*`.
    pub max_distance: f64,
    /// Max over trials of `distance / ||p||`.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub rows: Vec<SensitivityRow>,
    /// Empirical Lipschitz ratio, the largest `max_ratio`.
    pub k_hat: f64,
}

/// Perturbs `s*` by seeded uniform noise in `[−m, m]` per state (trial `i`
/// uses seed `seed + i`) and measures how far the canonical equilibrium
/// kernels move.
pub fn kernel_sensitivity_probe(
    model: &GameModel,
    s_star: &[f64],
    magnitudes: &[f64],
    trials: usize,
    seed: u64,
    tie_tol: f64,
) -> Result<SensitivityReport> {
    let n = model.n_states();
    let base = canonical_kernel(model, &equilibrium_set(model, s_star, tie_tol)?);
    let noise: Vec<Vec<f64>> = (0..trials)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            (0..n).map(|_| 2.0 * unit_f64(&mut rng) - 1.0).collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(magnitudes.len());
    for &magnitude in magnitudes {
        let mut max_distance = 0.0f64;
        let mut max_ratio = 0.0f64;
        for unit in &noise {
            let perturbation: Vec<f64> = unit.iter().map(|z| magnitude * z).collect();
            let s: Vec<f64> = s_star.iter().zip(&perturbation).map(|(a, b)| a + b).collect();
            let kernel = canonical_kernel(model, &equilibrium_set(model, &s, tie_tol)?);
            let mut distance = 0.0f64;
            for (row, base_row) in kernel.iter().zip(&base) {
                distance = distance.max(tv_distance(row, base_row)?);
            }
            let size = sup_norm(&perturbation);
            max_distance = max_distance.max(distance);
            if size > 0.0 {
                max_ratio = max_ratio.max(distance / size);
            }
        }
        rows.push(SensitivityRow {
            magnitude,
            max_distance,
            max_ratio,
        });
    }
    let k_hat = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    Ok(SensitivityReport { rows, k_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellman::{iterate_bellman, ActionPair};
    use crate::fixtures;
    use crate::solver::{solve, SolveOptions};
    use proptest::prelude::*;
    use std::vec;

    fn set(pairs: &[&[(usize, usize)]]) -> EquilibriumSet {
        EquilibriumSet {
            per_state: pairs
                .iter()
                .map(|ps| ps.iter().map(|&(u, v)| ActionPair::new(u, v)).collect())
                .collect(),
            tie_tolerance: 0.0,
        }
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(StateDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(StateDistribution::new(vec![0.5, 0.49]).is_err());
        assert!(StateDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(StateDistribution::new(vec![]).is_err());
    }

    #[test]
    fn discrete_hausdorff() {
        let m = fixtures::tiny_a();
        let a = set(&[&[(0, 0), (1, 1)], &[(1, 0)]]);
        assert_eq!(strategy_set_distance(&a, &a, &m), 0.0);
        let b = set(&[&[(0, 0), (1, 1)], &[(0, 1)]]);
        assert_eq!(strategy_set_distance(&a, &b, &m), 1.0);
        // Subset: one direction is zero, the other is one.
        let c = set(&[&[(0, 0)], &[(1, 0)]]);
        assert_eq!(strategy_set_distance(&a, &c, &m), 1.0);
    }

    #[test]
    fn coordinate_hausdorff() {
        let mut m = fixtures::tiny_a();
        m.actions.u_coords = Some(vec![vec![0.0], vec![0.3]]);
        m.actions.v_coords = Some(vec![vec![0.0], vec![1.0]]);
        let a = set(&[&[(0, 0)], &[(1, 1)]]);
        let b = set(&[&[(1, 0)], &[(1, 1)]]);
        assert!((strategy_set_distance(&a, &b, &m) - 0.3).abs() < 1e-15);
        // Only u has coordinates: v differences count as 1.
        m.actions.v_coords = None;
        let c = set(&[&[(0, 1)], &[(1, 1)]]);
        assert!((strategy_set_distance(&a, &c, &m) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn early_profile_from_fixed_point() {
        for (name, m) in fixtures::certified() {
            let r = solve(&m, SolveOptions::default()).unwrap();
            let p = early_turnpike_profile(&m, &r.s_star, &r.s_star, 40, 0.0, 1e-9).unwrap();
            assert_eq!(p.m, Some(0), "{name}");
            assert_eq!(p.per_step_distance.len(), 40);
            assert!(p.per_step_distance.iter().all(|d| *d == 0.0));
        }
    }

    #[test]
    fn early_profile_single_step_uses_terminal() {
        let m = fixtures::tiny_a();
        let r = solve(&m, SolveOptions::default()).unwrap();
        let p = early_turnpike_profile(&m, &m.terminal, &r.s_star, 1, 0.0, 1e-9).unwrap();
        assert_eq!(p.per_step_distance.len(), 1);
        let e_t = equilibrium_set(&m, &m.terminal, 1e-9).unwrap();
        let e_star = equilibrium_set(&m, &r.s_star, 1e-9).unwrap();
        assert_eq!(p.per_step_distance[0], strategy_set_distance(&e_t, &e_star, &m));
    }

    #[test]
    fn early_profile_tiny_a_recomputed() {
        let m = fixtures::tiny_a();
        let r = solve(&m, SolveOptions::default()).unwrap();
        let horizon = 50;
        let p = early_turnpike_profile(&m, &m.terminal, &r.s_star, horizon, 0.0, 1e-9).unwrap();
        let big_m = p.m.unwrap();
        assert!(big_m > 0 && big_m < horizon);
        let e_star = equilibrium_set(&m, &r.s_star, 1e-9).unwrap();
        for t in [3usize, 27, horizon - 2] {
            let v = iterate_bellman(&m, &m.terminal, horizon - t - 1).unwrap();
            let e = equilibrium_set(&m, &v, 1e-9).unwrap();
            let d = if e.per_state == e_star.per_state { 0.0 } else { 1.0 };
            assert_eq!(p.per_step_distance[t], d, "t={t}");
        }
        for t in 0..horizon - big_m {
            assert_eq!(p.per_step_distance[t], 0.0);
        }
        assert!(p.per_step_distance[horizon - big_m] > 0.0);
    }

    #[test]
    fn stationary_rank_one() {
        let row = [0.2, 0.5, 0.3];
        let m = fixtures::chain(&[&row, &row, &row]);
        let e = equilibrium_set(&m, &[0.0; 3], 0.0).unwrap();
        let st = stationary_distribution(&m, &e, 1e-14).unwrap();
        assert_eq!(st.distribution.probs(), &row);
        assert!(st.warnings.is_empty());
    }

    #[test]
    fn stationary_symmetric_switch() {
        let m = fixtures::chain(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let e = equilibrium_set(&m, &[0.0; 2], 0.0).unwrap();
        let st = stationary_distribution(&m, &e, 1e-14).unwrap();
        assert_eq!(st.distribution.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn stationary_two_state_balance() {
        // Balance: q0·0.3 = q1·0.6 and q0 + q1 = 1.
        let (a, b) = (0.3, 0.6);
        let oracle = [b / (a + b), a / (a + b)];
        let m = fixtures::chain(&[&[1.0 - a, a], &[b, 1.0 - b]]);
        let e = equilibrium_set(&m, &[0.0; 2], 0.0).unwrap();
        let st = stationary_distribution(&m, &e, 1e-13).unwrap();
        assert!(tv_distance(&st.distribution, &oracle).unwrap() < 1e-12);
        assert!((oracle[0] - 2.0 / 3.0).abs() < 1e-15);
        let kernel = canonical_kernel(&m, &e);
        assert!(tv_distance(&st.distribution.step(&kernel), &st.distribution).unwrap() <= 1e-13);
    }

    #[test]
    fn stationary_periodic_chain_fails() {
        // Period two with stationary law (1/4, 1/2, 1/4): the uniform start
        // oscillates forever.
        let m = fixtures::chain(&[&[0.0, 1.0, 0.0], &[0.5, 0.0, 0.5], &[0.0, 1.0, 0.0]]);
        let e = equilibrium_set(&m, &[0.0; 3], 0.0).unwrap();
        match stationary_distribution(&m, &e, 1e-12) {
            Err(Error::NoConvergence { iterations, .. }) => {
                assert_eq!(iterations, POWER_ITERATION_CAP)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stationary_tie_warns() {
        let m = fixtures::matrix_game(&[&[2.0, 2.0], &[2.0, 2.0]]);
        let e = equilibrium_set(&m, &[0.0], 0.0).unwrap();
        let st = stationary_distribution(&m, &e, 1e-12).unwrap();
        assert_eq!(st.warnings, [Warning::TiedEquilibrium { state: 0 }]);
    }

    #[test]
    fn middle_profile_from_stationary_state() {
        let m = fixtures::tiny_a();
        let r = solve(&m, SolveOptions::default()).unwrap();
        let e_star = equilibrium_set(&m, &r.s_star, 1e-9).unwrap();
        let q_star = stationary_distribution(&m, &e_star, 1e-15).unwrap().distribution;
        let (p, qs) =
            middle_turnpike_profile(&m, &r.s_star, &q_star, 30, &q_star, 0.01, 1e-9).unwrap();
        assert_eq!(p.per_step_distance.len(), 31);
        assert_eq!(qs.len(), 31);
        assert!(p.per_step_distance.iter().all(|d| *d < 1e-12));
        assert_eq!(p.m, Some(0));
    }

    #[test]
    fn middle_profile_rank_one_chain() {
        let row = [0.1, 0.6, 0.3];
        let m = fixtures::chain(&[&row, &row, &row]);
        let q_star = StateDistribution::new(row.to_vec()).unwrap();
        let (p, _) = middle_turnpike_profile(
            &m,
            &[0.0; 3],
            &q_star,
            10,
            &StateDistribution::point(3, 2),
            0.01,
            1e-9,
        )
        .unwrap();
        assert!(p.per_step_distance[0] > 0.5);
        assert!(p.per_step_distance[1..].iter().all(|d| *d < 1e-15));
        assert_eq!(p.m, Some(1));
        assert_eq!(p.window, Some((1, 9)));
    }

    #[test]
    fn middle_profile_tiny_a() {
        let m = fixtures::tiny_a();
        let r = solve(&m, SolveOptions::default()).unwrap();
        let e_star = equilibrium_set(&m, &r.s_star, 1e-9).unwrap();
        let q_star = stationary_distribution(&m, &e_star, 1e-14).unwrap().distribution;
        let horizon = 60;
        let initial = StateDistribution::uniform(2);
        let (p, qs) =
            middle_turnpike_profile(&m, &m.terminal, &q_star, horizon, &initial, 0.01, 1e-9)
                .unwrap();
        let big_m = p.m.expect("nonempty window");
        assert!(big_m <= 15, "M = {big_m}");
        for q in &qs {
            assert!((q.iter().sum::<f64>() - 1.0).abs() <= MASS_TOLERANCE);
        }
        // Independent recomputation of Q(t) as a row-vector/matrix product.
        for t in [7usize, 31, 58] {
            let mut q = initial.to_vec();
            for step in 0..t {
                let v = iterate_bellman(&m, &m.terminal, horizon - step - 1).unwrap();
                let e = equilibrium_set(&m, &v, 1e-9).unwrap();
                let mut next = vec![0.0; 2];
                for (x, qx) in q.iter().enumerate() {
                    let pair = e.canonical(x);
                    for (y, slot) in next.iter_mut().enumerate() {
                        *slot += qx * m.rho(pair.u, pair.v, x, y) * m.pi()[y];
                    }
                }
                q = next;
            }
            assert!(tv_distance(&q, &qs[t]).unwrap() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn sensitivity_zero_magnitude() {
        let m = fixtures::trio_b();
        let r = solve(&m, SolveOptions::default()).unwrap();
        let rep = kernel_sensitivity_probe(&m, &r.s_star, &[0.0], 10, 3, 1e-9).unwrap();
        assert_eq!(rep.rows[0].max_distance, 0.0);
        assert_eq!(rep.k_hat, 0.0);
    }

    /// Smallest magnitude `m` at which the perturbation `(−m, +m)` flips the
    /// canonical pair at state 0, located by bisection.
    fn flip_magnitude(model: &GameModel, s_star: &[f64]) -> f64 {
        let flips = |mag: f64| {
            let s = [s_star[0] - mag, s_star[1] + mag];
            equilibrium_set(model, &s, 0.0).unwrap().canonical(0) != ActionPair::new(1, 0)
        };
        let (mut lo, mut hi) = (0.0, 10.0);
        assert!(!flips(lo) && flips(hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if flips(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn sensitivity_strict_gaps_and_near_tie() {
        let gap = 0.2;
        let m = fixtures::near_tie(gap);
        let r = solve(&m, SolveOptions::default()).unwrap();
        let crossing = flip_magnitude(&m, &r.s_star);
        assert!((crossing - gap / 1.6).abs() < 1e-9);
        let rep = kernel_sensitivity_probe(
            &m,
            &r.s_star,
            &[0.5 * crossing, 0.99 * crossing, 2.0 * crossing],
            400,
            17,
            0.0,
        )
        .unwrap();
        assert_eq!(rep.rows[0].max_distance, 0.0);
        assert_eq!(rep.rows[1].max_distance, 0.0);
        assert!((rep.rows[2].max_distance - 0.8).abs() < 1e-12);
        assert!(rep.k_hat > 0.0);
    }

    #[test]
    fn sensitivity_is_deterministic() {
        let m = fixtures::near_tie(0.1);
        let r = solve(&m, SolveOptions::default()).unwrap();
        let a = kernel_sensitivity_probe(&m, &r.s_star, &[0.05, 0.2], 50, 9, 1e-9).unwrap();
        let b = kernel_sensitivity_probe(&m, &r.s_star, &[0.05, 0.2], 50, 9, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    fn dist(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, n).prop_map(|w| {
            let t: f64 = w.iter().sum();
            w.into_iter().map(|v| v / t).collect()
        })
    }

    proptest! {
        #[test]
        fn tv_is_a_metric((p, q, r) in (dist(5), dist(5), dist(5))) {
            let pq = tv_distance(&p, &q).unwrap();
            prop_assert_eq!(pq, tv_distance(&q, &p).unwrap());
            prop_assert!(tv_distance(&p, &p).unwrap() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&pq));
            prop_assert!(pq <= tv_distance(&p, &r).unwrap() + tv_distance(&r, &q).unwrap() + 1e-12);
        }

        #[test]
        fn strategy_distance_symmetric(seed in any::<u64>(), s1 in prop::collection::vec(-3.0f64..3.0, 3), s2 in prop::collection::vec(-3.0f64..3.0, 3), tol in 0.0f64..0.3) {
            let m = fixtures::random_game(seed, 3, 3, 3, false);
            let e1 = equilibrium_set(&m, &s1, tol).unwrap();
            let e2 = equilibrium_set(&m, &s2, tol).unwrap();
            prop_assert_eq!(strategy_set_distance(&e1, &e1, &m), 0.0);
            prop_assert_eq!(strategy_set_distance(&e1, &e2, &m), strategy_set_distance(&e2, &e1, &m));
        }

        #[test]
        fn propagation_conserves_mass(seed in any::<u64>(), horizon in 1usize..40) {
            let m = fixtures::random_game(seed, 5, 2, 2, true);
            let sched = strategy_schedule(&m, &m.terminal, horizon, 1e-9).unwrap();
            for q in propagate(&m, &sched, &StateDistribution::point(5, 0)) {
                prop_assert!((q.iter().sum::<f64>() - 1.0).abs() <= MASS_TOLERANCE);
                prop_assert!(q.iter().all(|p| *p >= 0.0));
            }
        }
    }
}
