//! JSON run reports. Field order is fixed by the struct definitions, so
//! identical runs produce byte-identical files.

use serde::Serialize;
use turnpike_core::{ActionPair, EquilibriumSet, GameModel, MinorizationCertificate};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report<R: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub status: Status,
    pub inputs: Inputs,
    /// Always present; `null` when the model has no certificate.
    pub certificate: Option<CertificateReport>,
    pub warnings: Vec<String>,
    pub result: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    InvalidModel,
    NoConvergence,
    CheckFailed,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    pub model: String,
    pub tol: f64,
    pub max_iter: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub tie_tol: f64,
    pub seed: u64,
    pub n: usize,
    pub initial: String,
}

#[derive(Debug, Serialize)]
pub struct CertificateReport {
    pub delta: f64,
    pub set_a: Vec<String>,
    pub set_a_indices: Vec<usize>,
    pub mass_a: f64,
    pub contraction_factor: f64,
}

impl CertificateReport {
    pub fn new(model: &GameModel, cert: &MinorizationCertificate) -> Self {
        CertificateReport {
            delta: cert.delta,
            set_a: cert
                .set_a
                .iter()
                .map(|&y| model.states.ids[y].clone())
                .collect(),
            set_a_indices: cert.set_a.clone(),
            mass_a: cert.mass_a,
            contraction_factor: cert.contraction_factor,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationReport {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct ValidateResult {
    pub valid: bool,
    pub violations: Vec<ViolationReport>,
}

#[derive(Debug, Serialize)]
pub struct CertifyResult {
    pub certified: bool,
    pub density_floors: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub certified: bool,
    pub lambda: f64,
    pub s_star: Vec<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    pub lambda_spread: f64,
    pub rate_history: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct NoConvergenceReport {
    pub error: String,
    pub iterations: usize,
    pub best_residual: f64,
    pub best_iterate: Vec<f64>,
}

/// A pair by labels, `[u, v]`.
pub type PairLabels = [String; 2];

pub fn pair_labels(model: &GameModel, p: ActionPair) -> PairLabels {
    [
        model.actions.u_labels[p.u].clone(),
        model.actions.v_labels[p.v].clone(),
    ]
}

/// Equilibrium pairs by state label.
pub fn equilibrium_labels(model: &GameModel, e: &EquilibriumSet) -> Vec<Vec<PairLabels>> {
    e.per_state
        .iter()
        .map(|pairs| pairs.iter().map(|&p| pair_labels(model, p)).collect())
        .collect()
}

pub const INDEX_CONVENTION: &str =
    "t counts play steps already taken; strategies at step t < T come from B^(T-t-1)(terminal)";

#[derive(Debug, Serialize)]
pub struct EarlyTurnpikeResult {
    pub index_convention: &'static str,
    pub lambda: f64,
    pub stationary_equilibrium: Vec<Vec<PairLabels>>,
    pub metric: &'static str,
    pub m: Option<usize>,
    pub window: Option<(usize, usize)>,
    pub distances: Vec<f64>,
    pub profile_csv: String,
}

#[derive(Debug, Serialize)]
pub struct MiddleTurnpikeResult {
    pub index_convention: &'static str,
    pub lambda: f64,
    pub stationary_equilibrium: Vec<Vec<PairLabels>>,
    pub q_star: Vec<f64>,
    pub m: Option<usize>,
    pub window: Option<(usize, usize)>,
    pub max_distance_in_window: Option<f64>,
    pub distances: Vec<f64>,
    pub profile_csv: String,
}

/// Rollout summary.
#[derive(Debug, Serialize)]
pub struct SimulateResult {
    pub lambda_hat: f64,
    pub occupation: Vec<Vec<f64>>,
    pub n: usize,
    pub seed: u64,
    pub horizon: usize,
    pub lambda: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleCheckResult {
    pub agree: bool,
    pub tolerance: f64,
    /// `max_x |B^T s − oracle_T(s)|` for `T = 1..=horizon`.
    pub max_abs_difference: Vec<f64>,
    pub lambda: f64,
    /// `mean_x (V_T − V_{T−1})` from the oracle at `T = horizon`.
    pub lambda_extrapolated: f64,
}

pub fn to_json<R: Serialize>(report: &Report<R>) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}
