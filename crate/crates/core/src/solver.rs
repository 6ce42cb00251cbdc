//! Average-cost solver: relative value iteration in the span quotient.
//!
//! Iterates `s ← project(B s)` from the projected terminal cost. With a
//! minorization certificate of factor `f < 1` the quotient operator is a
//! contraction, and the run stops once the successive quotient distance `d`
//! satisfies `d ≤ tol` and the a-posteriori Banach bound
//! `d·f/(1−f) ≤ tol`. The returned relative value `s*` is the iterate at
//! which that distance was measured, so its residual
//! `½ span(B s* − s*)` is `d` itself. The average cost is
//! `λ = mean_x (B s* − s*)(x)`.

use alloc::vec::Vec;

use crate::bellman::apply_bellman;
use crate::certificate::{minorization_search, MinorizationCertificate};
use crate::error::{Error, Result, Warning};
use crate::model::{GameModel, ValueFunction};
use crate::quotient::{difference, project, quotient_distance, quotient_norm, sup_norm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Average cost per step.
    pub lambda: f64,
    /// Relative value, normalized so that `max = −min`.
    pub s_star: ValueFunction,
    pub iterations: usize,
    /// `quotient_distance(B s*, s* + λ)`.
    pub final_residual: f64,
    /// `max − min` of `B s* − s*`; zero for an exact fixed point.
    pub lambda_spread: f64,
    /// Successive quotient distances, one per iteration.
    pub rate_history: Vec<f64>,
    pub certificate: Option<MinorizationCertificate>,
    pub warnings: Vec<Warning>,
}

impl SolveResult {
    pub fn is_certified(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn contraction_factor(&self) -> Option<f64> {
        self.certificate.as_ref().map(|c| c.contraction_factor)
    }
}

/// Solves from the model's projected terminal cost.
pub fn solve(model: &GameModel, opts: SolveOptions) -> Result<SolveResult> {
    solve_from(model, &model.terminal, opts)
}

/// Solves from an arbitrary initial value function.
pub fn solve_from(model: &GameModel, initial: &[f64], opts: SolveOptions) -> Result<SolveResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    model.check_value_len(initial)?;
    model.ensure_valid()?;

    let certificate = minorization_search(model);
    let mut warnings = Vec::new();
    let banach_limit = match &certificate {
        Some(c) => {
            let f = c.contraction_factor;
            opts.tol * (1.0 - f) / f.max(1e-300)
        }
        None => {
            warnings.push(Warning::MissingCertificate);
            f64::INFINITY
        }
    };

    let mut s = project(initial);
    let mut rate_history = Vec::new();
    let mut best: Option<(f64, ValueFunction)> = None;
    let mut iterations = 0;
    loop {
        let b = apply_bellman(model, &s)?;
        let gain = difference(&b, &s)?;
        let residual = quotient_norm(&gain);
        if residual <= opts.tol && residual <= banach_limit {
            let lambda = gain.iter().sum::<f64>() / gain.len() as f64;
            let lambda_spread = 2.0 * residual;
            return Ok(SolveResult {
                lambda,
                s_star: s,
                iterations,
                final_residual: residual,
                lambda_spread,
                rate_history,
                certificate,
                warnings,
            });
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, s.clone()));
        }
        if iterations >= opts.max_iter {
            let (residual, best) = best.expect("at least one iterate");
            return Err(Error::NoConvergence {
                iterations,
                residual,
                best,
            });
        }
        let next = project(&b);
        rate_history.push(residual);
        s = next;
        iterations += 1;
    }
}

/// One row of [`average_cost_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct AverageCostStep {
    pub t: usize,
    /// `B^t s`.
    pub values: ValueFunction,
    /// `||B^t s − tλ||` (sup norm).
    pub gap: f64,
    /// `||B^t s − tλ − s*||`; identically zero when `s = s*`.
    pub deviation: f64,
    pub exceeds_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageCostRun {
    /// `||s*|| + ||s − s*||`, the uniform bound on every gap.
    pub bound: f64,
    pub steps: Vec<AverageCostStep>,
}

impl AverageCostRun {
    pub fn violations(&self) -> usize {
        self.steps.iter().filter(|s| s.exceeds_bound).count()
    }
}

/// Slack allowed above the gap bound before a step is flagged.
pub const GAP_SLACK: f64 = 1e-8;

/// Tracks `B^t s` against `tλ` for `t = 0..=horizon`.
pub fn average_cost_run(
    model: &GameModel,
    result: &SolveResult,
    s: &[f64],
    horizon: usize,
) -> Result<AverageCostRun> {
    model.check_value_len(s)?;
    let s_star = &result.s_star;
    let bound = sup_norm(s_star) + sup_norm(&difference(s, s_star)?);
    let mut steps = Vec::with_capacity(horizon + 1);
    let mut cur = ValueFunction::from(s);
    for t in 0..=horizon {
        if t > 0 {
            cur = apply_bellman(model, &cur)?;
        }
        let offset = t as f64 * result.lambda;
        let gap = cur.iter().fold(0.0f64, |m, v| m.max((v - offset).abs()));
        let deviation = cur
            .iter()
            .zip(s_star.iter())
            .fold(0.0f64, |m, (v, w)| m.max((v - offset - w).abs()));
        steps.push(AverageCostStep {
            t,
            values: cur.clone(),
            gap,
            deviation,
            exceeds_bound: gap > bound + GAP_SLACK,
        });
    }
    Ok(AverageCostRun { bound, steps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceStep {
    pub t: usize,
    /// `quotient_distance(B^t s, s*)`.
    pub distance: f64,
    /// `f^t · d_0`.
    pub envelope: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub factor: f64,
    pub steps: Vec<ConvergenceStep>,
}

impl ConvergenceReport {
    pub fn violations(&self) -> usize {
        self.steps.iter().filter(|s| s.violated).count()
    }
}

/// Slack allowed above the geometric envelope before a step is flagged.
pub const ENVELOPE_SLACK: f64 = 1e-8;

/// Compares the quotient distance of `B^t s` to `s*` with the geometric
/// envelope `f^t·d_0`. Requires a certificate.
pub fn convergence_report(
    model: &GameModel,
    result: &SolveResult,
    s: &[f64],
    horizon: usize,
) -> Result<ConvergenceReport> {
    let factor = result
        .contraction_factor()
        .ok_or(Error::MissingCertificate)?;
    model.check_value_len(s)?;
    let d0 = quotient_distance(s, &result.s_star)?;
    let mut steps = Vec::with_capacity(horizon + 1);
    let mut cur = ValueFunction::from(s);
    let mut envelope = d0;
    for t in 0..=horizon {
        if t > 0 {
            cur = apply_bellman(model, &cur)?;
            envelope *= factor;
        }
        let distance = quotient_distance(&cur, &result.s_star)?;
        steps.push(ConvergenceStep {
            t,
            distance,
            envelope,
            violated: distance > envelope + ENVELOPE_SLACK,
        });
    }
    Ok(ConvergenceReport { factor, steps })
}
