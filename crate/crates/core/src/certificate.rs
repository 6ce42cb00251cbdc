//! Minorization (Doeblin) certificates.
//!
//! A certificate is a pair `(δ, A)` with `rho[u][v][x][y] ≥ δ` for every
//! control pair, every source state and every `y ∈ A`. Under it the
//! quotient Bellman operator contracts with factor `1 − δ·π(A)`.

use alloc::vec::Vec;

use crate::model::GameModel;

#[derive(Debug, Clone, PartialEq)]
pub struct MinorizationCertificate {
    pub delta: f64,
    /// State indices in ascending order.
    pub set_a: Vec<usize>,
    pub mass_a: f64,
    pub contraction_factor: f64,
}

impl MinorizationCertificate {
    fn from_set(model: &GameModel, delta: f64, set_a: Vec<usize>) -> Self {
        let mass_a: f64 = set_a.iter().map(|&y| model.pi()[y]).sum();
        // Rounding can push δ·π(A) a hair above one on saturated kernels.
        let contraction_factor = (1.0 - delta * mass_a).max(0.0);
        MinorizationCertificate {
            delta,
            set_a,
            mass_a,
            contraction_factor,
        }
    }

    /// `δ·π(A)`.
    pub fn strength(&self) -> f64 {
        self.delta * self.mass_a
    }

    /// Exhaustively checks the certificate against `model`.
    pub fn verify(&self, model: &GameModel) -> bool {
        let n = model.n_states();
        if self.set_a.is_empty()
            || !(self.delta > 0.0)
            || !(self.mass_a > 0.0)
            || self.set_a.iter().any(|&y| y >= n)
            || !(0.0..1.0).contains(&self.contraction_factor)
        {
            return false;
        }
        for u in 0..model.n_u() {
            for v in 0..model.n_v() {
                for x in 0..n {
                    let row = model.rho_row(u, v, x);
                    if self.set_a.iter().any(|&y| row[y] < self.delta) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Column floors `min_{u,v,x} rho[u][v][x][y]` for every target `y`.
pub fn density_floors(model: &GameModel) -> Vec<f64> {
    let n = model.n_states();
    let mut floor = alloc::vec![f64::INFINITY; n];
    for u in 0..model.n_u() {
        for v in 0..model.n_v() {
            for x in 0..n {
                for (f, &r) in floor.iter_mut().zip(model.rho_row(u, v, x)) {
                    *f = f.min(r);
                }
            }
        }
    }
    floor
}

/// Best certificate among threshold-induced sets `A(δ) = {y : floor(y) ≥ δ}`.
///
/// Any set whose smallest floor is `δ` is contained in `A(δ)`, so scanning
/// the distinct positive floors is enough to maximize `δ·π(A)`. Ties go to
/// the larger set. Returns `None` when every floor is zero.
pub fn minorization_search(model: &GameModel) -> Option<MinorizationCertificate> {
    let floor = density_floors(model);
    let pi = model.pi();
    let mut best: Option<(f64, f64, usize)> = None; // (strength, delta, |A|)
    for &delta in floor.iter().filter(|&&f| f > 0.0) {
        let (mass, size) = floor
            .iter()
            .zip(pi)
            .filter(|(f, _)| **f >= delta)
            .fold((0.0, 0usize), |(m, k), (_, p)| (m + p, k + 1));
        let strength = delta * mass;
        let better = match best {
            None => true,
            Some((s, _, k)) => strength > s || (strength == s && size > k),
        };
        if better {
            best = Some((strength, delta, size));
        }
    }
    let (_, delta, _) = best?;
    let set_a = (0..floor.len()).filter(|&y| floor[y] >= delta).collect();
    Some(MinorizationCertificate::from_set(model, delta, set_a))
}
