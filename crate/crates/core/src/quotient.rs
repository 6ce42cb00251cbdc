//! Value functions modulo additive constants.
//!
//! The quotient norm of `f` is `inf_a ||f + a|| = ½(max f − min f)`. The
//! canonical representative of a class is the one with `max = −min`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::ValueFunction;

fn extremes(s: &[f64]) -> (f64, f64) {
    s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// `½(max s − min s)`; zero for empty or constant input.
pub fn quotient_norm(s: &[f64]) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let (lo, hi) = extremes(s);
    0.5 * (hi - lo)
}

/// `max_x |s[x]|`.
pub fn sup_norm(s: &[f64]) -> f64 {
    s.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// Shifts `s` by a constant so that `max = −min`.
pub fn project(s: &[f64]) -> ValueFunction {
    if s.is_empty() {
        return ValueFunction::default();
    }
    let (lo, hi) = extremes(s);
    let mid = 0.5 * (hi + lo);
    ValueFunction(s.iter().map(|v| v - mid).collect())
}

/// Quotient norm of `s1 − s2`.
pub fn quotient_distance(s1: &[f64], s2: &[f64]) -> Result<f64> {
    Ok(quotient_norm(&difference(s1, s2)?))
}

/// Pointwise `s1 − s2`.
pub fn difference(s1: &[f64], s2: &[f64]) -> Result<Vec<f64>> {
    if s1.len() != s2.len() {
        return Err(Error::LengthMismatch {
            what: "value function",
            expected: s1.len(),
            found: s2.len(),
        });
    }
    Ok(s1.iter().zip(s2).map(|(a, b)| a - b).collect())
}

/// `max_x |s1[x] − s2[x]|`.
pub fn sup_distance(s1: &[f64], s2: &[f64]) -> Result<f64> {
    Ok(sup_norm(&difference(s1, s2)?))
}
