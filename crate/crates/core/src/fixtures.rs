//! Small reference games used by tests, examples and the acceptance suite.
//!
//! `tiny_a`, `trio_b` and `quad_c` are certified (positive minorization
//! strength) and have a unique, strictly separated stationary equilibrium at
//! every state.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::model::{
    ActionSets, CostFunction, GameModel, StateSpace, TransitionKernel, ValueFunction,
};
use crate::sim::unit_f64;

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Builds a model from per-state transition probabilities
/// `probs[u][v][x][y]` (so `rho = probs / pi`).
pub fn from_probabilities(
    pi: &[f64],
    probs: &[Vec<Vec<Vec<f64>>>],
    costs: &[Vec<Vec<Vec<f64>>>],
    terminal: &[f64],
) -> GameModel {
    let n = pi.len();
    let nu = probs.len();
    let nv = probs[0].len();
    let mut rho = Vec::with_capacity(nu * nv * n * n);
    let mut g = Vec::with_capacity(nu * nv * n * n);
    for u in 0..nu {
        for v in 0..nv {
            for x in 0..n {
                for y in 0..n {
                    rho.push(probs[u][v][x][y] / pi[y]);
                    g.push(costs[u][v][x][y]);
                }
            }
        }
    }
    let bound = g.iter().fold(0.0f64, |b, c| b.max(c.abs()));
    GameModel::new(
        StateSpace {
            ids: labels("s", n),
            pi: pi.to_vec(),
        },
        ActionSets::new(labels("u", nu), labels("v", nv)),
        TransitionKernel { rho },
        CostFunction { g, bound },
        ValueFunction::from(terminal),
    )
    .expect("fixture extents are consistent")
}

fn nest(flat: &[f64], nu: usize, nv: usize, n: usize) -> Vec<Vec<Vec<Vec<f64>>>> {
    let mut it = flat.iter().copied();
    (0..nu)
        .map(|_| {
            (0..nv)
                .map(|_| (0..n).map(|_| (0..n).map(|_| it.next().unwrap()).collect()).collect())
                .collect()
        })
        .collect()
}

/// One state, one action each, zero cost.
pub fn trivial() -> GameModel {
    from_probabilities(&[1.0], &nest(&[1.0], 1, 1, 1), &nest(&[0.0], 1, 1, 1), &[0.0])
}

/// Two states, 2×2 actions, unit weights, floors (0.2, 0.1). Average cost
/// 2.875; the stationary equilibrium is `(1,0)` at state 0 and `(1,1)` at
/// state 1. The terminal cost `(0, 6)` perturbs the last few steps.
pub fn tiny_a() -> GameModel {
    #[rustfmt::skip]
    let probs = [
        0.8, 0.2,  0.4, 0.6,   // u0 v0
        0.6, 0.4,  0.7, 0.3,   // u0 v1
        0.3, 0.7,  0.2, 0.8,   // u1 v0
        0.5, 0.5,  0.9, 0.1,   // u1 v1
    ];
    // Per (u, v, x) base cost b: g = b when landing in state 0, b + 1 in state 1.
    let base = [1.0, 2.5, 3.0, 0.5, 2.0, 1.0, 1.5, 3.0];
    let costs: Vec<f64> = base.iter().flat_map(|&b| [b, b + 1.0]).collect();
    from_probabilities(
        &[1.0, 1.0],
        &nest(&probs, 2, 2, 2),
        &nest(&costs, 2, 2, 2),
        &[0.0, 6.0],
    )
}

/// Three states with weights (0.5, 1, 2), 3×2 actions.
pub fn trio_b() -> GameModel {
    #[rustfmt::skip]
    let probs = [
        0.29, 0.37, 0.34,  0.21, 0.38, 0.41,  0.63, 0.07, 0.3,
        0.46, 0.23, 0.31,  0.3, 0.4, 0.3,  0.12, 0.38, 0.5,
        0.22, 0.48, 0.3,  0.6, 0.07, 0.33,  0.6, 0.3, 0.1,
        0.28, 0.36, 0.36,  0.45, 0.2, 0.35,  0.4, 0.23, 0.37,
        0.48, 0.16, 0.36,  0.38, 0.19, 0.43,  0.27, 0.6, 0.13,
        0.72, 0.11, 0.17,  0.33, 0.33, 0.34,  0.27, 0.46, 0.27,
    ];
    #[rustfmt::skip]
    let costs = [
        2.75, -1.0, -1.75,  0.25, 0.75, 2.75,  0.5, -1.5, 2.5,
        0.0, 1.0, -0.25,  -1.75, 1.25, 1.5,  -1.75, -0.25, -0.75,
        -2.0, -1.75, 2.75,  2.25, -0.75, 1.5,  -2.75, 2.5, 0.25,
        2.0, -1.25, -0.75,  -1.0, 2.75, -0.5,  0.0, 2.75, 2.5,
        -0.75, -1.25, 1.75,  -2.25, -0.75, 2.25,  2.5, -1.5, -2.5,
        1.75, 0.75, -1.5,  0.0, -2.5, 1.25,  0.25, 1.25, -2.5,
    ];
    from_probabilities(
        &[0.5, 1.0, 2.0],
        &nest(&probs, 3, 2, 3),
        &nest(&costs, 3, 2, 3),
        &[3.0, -2.0, 0.0],
    )
}

/// Four states with weights (1, 1, 0.5, 0.25), 2×3 actions.
pub fn quad_c() -> GameModel {
    #[rustfmt::skip]
    let probs = [
        0.17, 0.19, 0.28, 0.36,  0.03, 0.08, 0.41, 0.48,  0.14, 0.16, 0.46, 0.24,  0.17, 0.46, 0.14, 0.23,
        0.48, 0.41, 0.07, 0.04,  0.29, 0.25, 0.27, 0.19,  0.34, 0.15, 0.19, 0.32,  0.14, 0.29, 0.14, 0.43,
        0.5, 0.08, 0.21, 0.21,  0.49, 0.11, 0.27, 0.13,  0.04, 0.62, 0.08, 0.26,  0.24, 0.24, 0.07, 0.45,
        0.3, 0.38, 0.04, 0.28,  0.15, 0.27, 0.44, 0.14,  0.32, 0.09, 0.16, 0.43,  0.32, 0.36, 0.21, 0.11,
        0.2, 0.27, 0.2, 0.33,  0.13, 0.23, 0.29, 0.35,  0.26, 0.03, 0.4, 0.31,  0.49, 0.26, 0.2, 0.05,
        0.17, 0.24, 0.28, 0.31,  0.13, 0.32, 0.42, 0.13,  0.16, 0.36, 0.27, 0.21,  0.23, 0.18, 0.33, 0.26,
    ];
    #[rustfmt::skip]
    let costs = [
        -2.0, 2.0, 1.0, 1.75,  -1.75, 1.75, -1.75, -2.5,  2.25, 2.25, 2.25, -0.25,  -1.25, -3.0, 0.75, 1.25,
        2.0, -1.25, -1.75, 0.75,  1.75, 2.75, -2.0, 0.0,  2.25, -0.5, 0.5, -2.75,  1.0, 2.5, 2.0, 2.25,
        1.0, -1.5, 1.5, -1.75,  2.0, -2.5, 2.0, -2.0,  -0.75, -1.0, 1.25, -2.0,  -0.5, -3.0, -1.5, -0.5,
        -2.25, 0.75, -0.75, 1.25,  1.0, -0.5, 2.25, 0.75,  1.75, -1.0, 0.25, -1.75,  3.0, -1.5, -1.5, -2.5,
        -1.5, 1.5, 1.25, -2.25,  -0.75, -0.5, 1.0, -0.25,  0.5, 2.0, 1.25, -0.75,  -0.25, -0.75, -2.25, -1.75,
        -1.25, -1.0, -1.0, 0.5,  2.75, 1.75, 1.75, 1.5,  0.5, 2.5, 1.25, 0.0,  -2.5, 0.0, -1.75, -2.25,
    ];
    from_probabilities(
        &[1.0, 1.0, 0.5, 0.25],
        &nest(&probs, 2, 3, 4),
        &nest(&costs, 2, 3, 4),
        &[0.0, 4.0, -4.0, 1.0],
    )
}

/// The certified reference games by name.
pub fn certified() -> Vec<(&'static str, GameModel)> {
    vec![("tiny-A", tiny_a()), ("trio-B", trio_b()), ("quad-C", quad_c())]
}

/// `n` states with unit weights and the uniform density `1/n` everywhere.
pub fn uniform_kernel(n: usize) -> GameModel {
    let p = 1.0 / n as f64;
    from_probabilities(
        &vec![1.0; n],
        &nest(&vec![p; n * n], 1, 1, n),
        &nest(&vec![0.0; n * n], 1, 1, n),
        &vec![0.0; n],
    )
}

/// Two states that swap deterministically.
pub fn deterministic_switch() -> GameModel {
    from_probabilities(
        &[1.0, 1.0],
        &nest(&[0.0, 1.0, 1.0, 0.0], 1, 1, 2),
        &nest(&[1.0, 0.0, 0.0, 1.0], 1, 1, 2),
        &[0.0, 0.0],
    )
}

/// Single-action chain with unit weights and the given transition matrix.
pub fn chain(matrix: &[&[f64]]) -> GameModel {
    let n = matrix.len();
    let flat: Vec<f64> = matrix.iter().flat_map(|r| r.iter().copied()).collect();
    from_probabilities(
        &vec![1.0; n],
        &nest(&flat, 1, 1, n),
        &nest(&vec![0.0; n * n], 1, 1, n),
        &vec![0.0; n],
    )
}

/// Three or more unit-weight states, one action pair, whose column floors
/// are exactly `floors` (which must sum to at most one). The leftover mass
/// of row `x` goes to state `x`.
pub fn with_floors(floors: &[f64]) -> GameModel {
    let n = floors.len();
    let rest = 1.0 - floors.iter().sum::<f64>();
    let mut flat = Vec::with_capacity(n * n);
    for x in 0..n {
        for (y, f) in floors.iter().enumerate() {
            flat.push(if x == y { f + rest } else { *f });
        }
    }
    from_probabilities(
        &vec![1.0; n],
        &nest(&flat, 1, 1, n),
        &nest(&vec![0.0; n * n], 1, 1, n),
        &vec![0.0; n],
    )
}

/// One-state game whose stage payoff is the matrix `payoff[u][v]`.
pub fn matrix_game(payoff: &[&[f64]]) -> GameModel {
    let nu = payoff.len();
    let nv = payoff[0].len();
    let flat: Vec<f64> = payoff.iter().flat_map(|r| r.iter().copied()).collect();
    from_probabilities(
        &[1.0],
        &nest(&vec![1.0; nu * nv], nu, nv, 1),
        &nest(&flat, nu, nv, 1),
        &[0.0],
    )
}

/// Two states, minimizer choice at state 0 only. At the stationary relative
/// value (a constant) action `u1` beats `u0` by exactly `gap`; a perturbation
/// `p` flips the choice once `0.8·(p1 − p0) > gap`. The equilibrium kernels
/// of the two choices are 0.8 apart in total variation.
pub fn near_tie(gap: f64) -> GameModel {
    #[rustfmt::skip]
    let probs = [
        0.9, 0.1,  0.5, 0.5,   // u0
        0.1, 0.9,  0.5, 0.5,   // u1
    ];
    #[rustfmt::skip]
    let costs = [
        gap, gap,  0.0, 0.0,
        0.0, 0.0,  1.0, 1.0,
    ];
    from_probabilities(
        &[1.0, 1.0],
        &nest(&probs, 2, 1, 2),
        &nest(&costs, 2, 1, 2),
        &[0.0, 0.0],
    )
}

/// Seeded random valid game. Weights are drawn from `[0.5, 2]`, costs from
/// `[−G, G]` with `G ∈ [1, 5]`. Dense games have strictly positive densities
/// (so a certificate exists); sparse games zero out about half of each row.
pub fn random_game(seed: u64, n: usize, nu: usize, nv: usize, sparse: bool) -> GameModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi: Vec<f64> = (0..n).map(|_| 0.5 + 1.5 * unit_f64(&mut rng)).collect();
    let bound = 1.0 + 4.0 * unit_f64(&mut rng);
    let mut probs = Vec::with_capacity(nu * nv * n * n);
    let mut costs = Vec::with_capacity(nu * nv * n * n);
    for _ in 0..nu * nv * n {
        let mut w: Vec<f64> = (0..n).map(|_| 0.05 + unit_f64(&mut rng)).collect();
        if sparse {
            let keep = (rng.next_u64() % n as u64) as usize;
            for (y, wy) in w.iter_mut().enumerate() {
                if y != keep && rng.next_u64() & 1 == 0 {
                    *wy = 0.0;
                }
            }
        }
        let total: f64 = w.iter().sum();
        probs.extend(w.iter().map(|v| v / total));
        costs.extend((0..n).map(|_| bound * (2.0 * unit_f64(&mut rng) - 1.0)));
    }
    let terminal: Vec<f64> = (0..n).map(|_| 10.0 * unit_f64(&mut rng) - 5.0).collect();
    let mut model = from_probabilities(
        &pi,
        &nest(&probs, nu, nv, n),
        &nest(&costs, nu, nv, n),
        &terminal,
    );
    model.cost.bound = bound;
    model
}
