//! Finite game instances and their validation.
//!
//! Four-dimensional arrays (`rho`, `g`) are stored flat in `[u][v][x][y]`
//! order, so the row `(u, v, x, ·)` is a contiguous slice of length `n`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// Tolerance on `Σ_y rho·pi = 1` for every `(u, v, x)`.
pub const ROW_MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub ids: Vec<String>,
    /// Reference-measure weight of each state.
    pub pi: Vec<f64>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn total_mass(&self) -> f64 {
        self.pi.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSets {
    pub u_labels: Vec<String>,
    pub v_labels: Vec<String>,
    /// Optional embedding of each `u` action, used by graded strategy metrics.
    pub u_coords: Option<Vec<Vec<f64>>>,
    pub v_coords: Option<Vec<Vec<f64>>>,
}

impl ActionSets {
    pub fn new(u_labels: Vec<String>, v_labels: Vec<String>) -> Self {
        ActionSets {
            u_labels,
            v_labels,
            u_coords: None,
            v_coords: None,
        }
    }

    pub fn has_coords(&self) -> bool {
        self.u_coords.is_some() || self.v_coords.is_some()
    }
}

/// Transition density `rho[u][v][x][y]` with respect to the state weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    pub rho: Vec<f64>,
}

/// Transition cost `g[u][v][x][y]` paid by the minimizer, with its stated
/// uniform bound `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    pub g: Vec<f64>,
    pub bound: f64,
}

/// A real-valued function on the states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueFunction(pub Vec<f64>);

impl ValueFunction {
    pub fn new(values: Vec<f64>) -> Self {
        ValueFunction(values)
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ValueFunction(alloc::vec![c; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Pointwise `self + a`.
    pub fn shifted(&self, a: f64) -> Self {
        ValueFunction(self.0.iter().map(|v| v + a).collect())
    }
}

impl Deref for ValueFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ValueFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ValueFunction {
    fn from(values: Vec<f64>) -> Self {
        ValueFunction(values)
    }
}

impl From<&[f64]> for ValueFunction {
    fn from(values: &[f64]) -> Self {
        ValueFunction(values.to_vec())
    }
}

/// The tuple `(X, π, U, V, ρ, g, S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameModel {
    pub states: StateSpace,
    pub actions: ActionSets,
    pub kernel: TransitionKernel,
    pub cost: CostFunction,
    pub terminal: ValueFunction,
}

impl GameModel {
    /// Assembles a model, checking that all array extents agree. Value
    /// invariants (positivity, row mass, cost bound) are left to [`validate`].
    pub fn new(
        states: StateSpace,
        actions: ActionSets,
        kernel: TransitionKernel,
        cost: CostFunction,
        terminal: ValueFunction,
    ) -> Result<Self> {
        let model = GameModel {
            states,
            actions,
            kernel,
            cost,
            terminal,
        };
        model.check_extents()?;
        Ok(model)
    }

    pub fn check_extents(&self) -> Result<()> {
        let n = self.n_states();
        if self.states.pi.len() != n {
            return Err(Error::ExtentMismatch {
                array: "pi",
                expected: n,
                found: self.states.pi.len(),
            });
        }
        let cells = self.n_u() * self.n_v() * n * n;
        if self.kernel.rho.len() != cells {
            return Err(Error::ExtentMismatch {
                array: "rho",
                expected: cells,
                found: self.kernel.rho.len(),
            });
        }
        if self.cost.g.len() != cells {
            return Err(Error::ExtentMismatch {
                array: "g",
                expected: cells,
                found: self.cost.g.len(),
            });
        }
        if self.terminal.len() != n {
            return Err(Error::ExtentMismatch {
                array: "terminal",
                expected: n,
                found: self.terminal.len(),
            });
        }
        Ok(())
    }

    #[inline]
    pub fn n_states(&self) -> usize {
        self.states.ids.len()
    }

    #[inline]
    pub fn n_u(&self) -> usize {
        self.actions.u_labels.len()
    }

    #[inline]
    pub fn n_v(&self) -> usize {
        self.actions.v_labels.len()
    }

    #[inline]
    pub fn pi(&self) -> &[f64] {
        &self.states.pi
    }

    #[inline]
    fn row_offset(&self, u: usize, v: usize, x: usize) -> usize {
        let n = self.n_states();
        ((u * self.n_v() + v) * n + x) * n
    }

    /// Densities `rho[u][v][x][·]`.
    #[inline]
    pub fn rho_row(&self, u: usize, v: usize, x: usize) -> &[f64] {
        let o = self.row_offset(u, v, x);
        &self.kernel.rho[o..o + self.n_states()]
    }

    /// Costs `g[u][v][x][·]`.
    #[inline]
    pub fn g_row(&self, u: usize, v: usize, x: usize) -> &[f64] {
        let o = self.row_offset(u, v, x);
        &self.cost.g[o..o + self.n_states()]
    }

    #[inline]
    pub fn rho(&self, u: usize, v: usize, x: usize, y: usize) -> f64 {
        self.kernel.rho[self.row_offset(u, v, x) + y]
    }

    #[inline]
    pub fn g(&self, u: usize, v: usize, x: usize, y: usize) -> f64 {
        self.cost.g[self.row_offset(u, v, x) + y]
    }

    /// Transition probabilities `rho[u][v][x][y]·pi[y]` for the pair `(u, v)`
    /// played at `x`.
    pub fn transition_probs(&self, u: usize, v: usize, x: usize) -> Vec<f64> {
        self.rho_row(u, v, x)
            .iter()
            .zip(self.pi())
            .map(|(r, p)| r * p)
            .collect()
    }

    pub fn check_value_len(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.n_states() {
            return Err(Error::LengthMismatch {
                what: "value function",
                expected: self.n_states(),
                found: s.len(),
            });
        }
        Ok(())
    }

    /// Returns `Err(InvalidModel)` listing the first violation, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidModel(format!(
                "{} ({} violation(s) total)",
                v,
                report.violations.len()
            ))),
        }
    }
}

/// One violated invariant, located by an index path such as
/// `rho[0][1][2][*]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: String, message: &str) {
        self.violations.push(Violation {
            path,
            message: String::from(message),
        });
    }
}

fn check_labels(report: &mut ValidationReport, field: &str, labels: &[String]) {
    if labels.is_empty() {
        report.push(String::from(field), "at least one entry required");
    }
    let mut seen = BTreeSet::new();
    for (i, label) in labels.iter().enumerate() {
        if !seen.insert(label.as_str()) {
            report.push(format!("{field}[{i}]"), "labels must be unique");
        }
    }
}

fn check_coords(report: &mut ValidationReport, field: &str, coords: &[Vec<f64>], count: usize) {
    if coords.len() != count {
        report.push(String::from(field), "one coordinate vector per action required");
        return;
    }
    let dim = coords.first().map_or(0, Vec::len);
    for (i, c) in coords.iter().enumerate() {
        if c.len() != dim {
            report.push(format!("{field}[{i}]"), "coordinate vectors must have equal dimension");
        }
        if c.iter().any(|v| !v.is_finite()) {
            report.push(format!("{field}[{i}]"), "coordinates must be finite");
        }
    }
}

/// Lists every violated standing assumption. The model is not modified and
/// violations are returned as data.
pub fn validate(model: &GameModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_labels(&mut report, "states.ids", &model.states.ids);
    check_labels(&mut report, "actions.u", &model.actions.u_labels);
    check_labels(&mut report, "actions.v", &model.actions.v_labels);
    if let Some(c) = &model.actions.u_coords {
        check_coords(&mut report, "actions.u_coords", c, model.n_u());
    }
    if let Some(c) = &model.actions.v_coords {
        check_coords(&mut report, "actions.v_coords", c, model.n_v());
    }

    if let Err(e) = model.check_extents() {
        let array = match e {
            Error::ExtentMismatch { array, .. } => array,
            _ => "model",
        };
        report.violations.push(Violation {
            path: String::from(array),
            message: format!("{e}"),
        });
        // Index-level checks are meaningless once extents disagree.
        return report;
    }

    let mut pi_ok = true;
    for (x, &p) in model.states.pi.iter().enumerate() {
        if !(p.is_finite() && p > 0.0) {
            report.push(format!("pi[{x}]"), "pi[x] > 0");
            pi_ok = false;
        }
    }

    let bound = model.cost.bound;
    if !(bound.is_finite() && bound >= 0.0) {
        report.push(String::from("G"), "G must be finite and nonnegative");
    }

    let n = model.n_states();
    for u in 0..model.n_u() {
        for v in 0..model.n_v() {
            for x in 0..n {
                let row = model.rho_row(u, v, x);
                let mut row_ok = true;
                for (y, &r) in row.iter().enumerate() {
                    if !(r.is_finite() && r >= 0.0) {
                        report.push(format!("rho[{u}][{v}][{x}][{y}]"), "rho >= 0");
                        row_ok = false;
                    }
                }
                if pi_ok && row_ok {
                    let mass: f64 = row.iter().zip(model.pi()).map(|(r, p)| r * p).sum();
                    if (mass - 1.0).abs() > ROW_MASS_TOLERANCE {
                        report.push(
                            format!("rho[{u}][{v}][{x}][*]"),
                            "row mass ≠ 1",
                        );
                    }
                }
                for (y, &c) in model.g_row(u, v, x).iter().enumerate() {
                    if !c.is_finite() || c.abs() > bound {
                        report.push(format!("g[{u}][{v}][{x}][{y}]"), "|g| <= G");
                    }
                }
            }
        }
    }

    for (x, s) in model.terminal.iter().enumerate() {
        if !s.is_finite() {
            report.push(format!("terminal[{x}]"), "terminal cost must be finite");
        }
    }
    report
}
