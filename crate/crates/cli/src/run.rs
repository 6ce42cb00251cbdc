//! Batch pipelines behind each subcommand.
//!
//! Exit statuses: 0 success, 2 validation failure (or a failed check),
//! 3 no convergence, 4 I/O, parse or argument errors.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use turnpike_core::bellman::{equilibrium_set, iterate_bellman};
use turnpike_core::certificate::density_floors;
use turnpike_core::quotient::sup_distance;
use turnpike_core::sim::{oracle_game_value, rollout_from};
use turnpike_core::turnpike::{
    early_turnpike_profile, middle_turnpike_profile, stationary_distribution,
};
use turnpike_core::{
    minorization_search, solve, validate, GameModel, SolveOptions, SolveResult, StateDistribution,
};

use crate::error::Error;
use crate::model_file::load_model;
use crate::report::{self, CertificateReport, Inputs, Report, Status};
use crate::profile_csv;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Agreement tolerance of `oracle-check`, relative to `max(1, ||B^T s||)`.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Certify,
    Solve,
    EarlyTurnpike,
    MiddleTurnpike,
    Simulate,
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Certify => "certify",
            Command::Solve => "solve",
            Command::EarlyTurnpike => "early-turnpike",
            Command::MiddleTurnpike => "middle-turnpike",
            Command::Simulate => "simulate",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub model_path: PathBuf,
    pub output_path: PathBuf,
    pub tol: f64,
    pub max_iter: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub tie_tol: f64,
    pub seed: u64,
    pub n: usize,
    /// A state label or `"uniform"`.
    pub initial: String,
}

impl RunConfig {
    pub fn new(command: Command, model_path: impl Into<PathBuf>, output_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            model_path: model_path.into(),
            output_path: output_path.into(),
            tol: 1e-10,
            max_iter: 100_000,
            horizon: 100,
            epsilon: 0.01,
            tie_tol: 1e-9,
            seed: 0,
            n: 10_000,
            initial: String::from("uniform"),
        }
    }

    pub fn check(&self) -> Result<(), Error> {
        let usage = |m: &str| Err(Error::Usage(m.to_string()));
        if self.model_path.as_os_str().is_empty() || self.output_path.as_os_str().is_empty() {
            return usage("--model and --out must be nonempty paths");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return usage("--tol must be positive");
        }
        if self.max_iter == 0 || self.horizon == 0 || self.n == 0 {
            return usage("--max-iter, --horizon and --n must be positive");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return usage("--epsilon must be nonnegative");
        }
        if !(self.tie_tol >= 0.0 && self.tie_tol.is_finite()) {
            return usage("--tie-tol must be nonnegative");
        }
        Ok(())
    }

    fn inputs(&self) -> Inputs {
        Inputs {
            model: self.model_path.display().to_string(),
            tol: self.tol,
            max_iter: self.max_iter,
            horizon: self.horizon,
            epsilon: self.epsilon,
            tie_tol: self.tie_tol,
            seed: self.seed,
            n: self.n,
            initial: self.initial.clone(),
        }
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    fn initial_distribution(&self, model: &GameModel) -> Result<StateDistribution, Error> {
        if self.initial == "uniform" {
            return Ok(StateDistribution::uniform(model.n_states()));
        }
        model
            .states
            .index_of(&self.initial)
            .map(|x| StateDistribution::point(model.n_states(), x))
            .ok_or_else(|| Error::Usage(format!("unknown initial state `{}`", self.initial)))
    }
}

struct Run<'a> {
    config: &'a RunConfig,
    model: GameModel,
    warnings: Vec<String>,
}

impl Run<'_> {
    fn write<R: Serialize>(&self, status: Status, result: R) -> Result<(), Error> {
        let report = Report {
            schema_version: report::SCHEMA_VERSION,
            command: self.config.command.name(),
            status,
            inputs: self.config.inputs(),
            certificate: if validate(&self.model).is_valid() {
                minorization_search(&self.model).map(|c| CertificateReport::new(&self.model, &c))
            } else {
                None
            },
            warnings: self.warnings.clone(),
            result,
        };
        let path = &self.config.output_path;
        fs::write(path, report::to_json(&report)).map_err(|e| Error::io(path, e))
    }

    fn sidecar(&self) -> PathBuf {
        profile_csv::sidecar_path(&self.config.output_path)
    }

    /// Solves, writing a failure report and returning its exit status on
    /// `NoConvergence`.
    fn solve(&mut self) -> Result<Result<SolveResult, i32>, Error> {
        match solve(&self.model, self.config.solve_options()) {
            Ok(r) => {
                self.warnings.extend(r.warnings.iter().map(ToString::to_string));
                Ok(Ok(r))
            }
            Err(turnpike_core::Error::NoConvergence {
                iterations,
                residual,
                best,
            }) => {
                let error = format!("no convergence after {iterations} iterations");
                self.write(
                    Status::NoConvergence,
                    report::NoConvergenceReport {
                        error,
                        iterations,
                        best_residual: residual,
                        best_iterate: best.into_inner(),
                    },
                )?;
                Ok(Err(EXIT_NO_CONVERGENCE))
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// Executes one run and returns the process exit status. Diagnostics go
/// to stderr.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Core(turnpike_core::Error::NoConvergence { .. }) => EXIT_NO_CONVERGENCE,
                Error::Core(turnpike_core::Error::InvalidModel(_)) => EXIT_INVALID,
                _ => EXIT_IO,
            }
        }
    }
}

fn execute(config: &RunConfig) -> Result<i32, Error> {
    config.check()?;
    let model = load_model(&config.model_path)?;
    let mut run = Run {
        config,
        model,
        warnings: Vec::new(),
    };

    let validation = validate(&run.model);
    if config.command == Command::Validate || !validation.is_valid() {
        for v in &validation.violations {
            eprintln!("violation: {v}");
        }
        let status = if validation.is_valid() {
            Status::Ok
        } else {
            Status::InvalidModel
        };
        run.write(
            status,
            report::ValidateResult {
                valid: validation.is_valid(),
                violations: validation
                    .violations
                    .iter()
                    .map(|v| report::ViolationReport {
                        path: v.path.clone(),
                        message: v.message.clone(),
                    })
                    .collect(),
            },
        )?;
        return Ok(if validation.is_valid() {
            EXIT_OK
        } else {
            EXIT_INVALID
        });
    }

    match config.command {
        Command::Validate => unreachable!("handled above"),
        Command::Certify => certify(&mut run),
        Command::Solve => solve_cmd(&mut run),
        Command::EarlyTurnpike => early(&mut run),
        Command::MiddleTurnpike => middle(&mut run),
        Command::Simulate => simulate(&mut run),
        Command::OracleCheck => oracle_check(&mut run),
    }
}

fn certify(run: &mut Run<'_>) -> Result<i32, Error> {
    let cert = minorization_search(&run.model);
    if cert.is_none() {
        let w = turnpike_core::Warning::MissingCertificate.to_string();
        eprintln!("warning: {w}");
        run.warnings.push(w);
    }
    run.write(
        Status::Ok,
        report::CertifyResult {
            certified: cert.is_some(),
            density_floors: density_floors(&run.model),
        },
    )?;
    Ok(EXIT_OK)
}

fn solve_cmd(run: &mut Run<'_>) -> Result<i32, Error> {
    let r = match run.solve()? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    run.write(
        Status::Ok,
        report::SolveReport {
            certified: r.is_certified(),
            lambda: r.lambda,
            s_star: r.s_star.to_vec(),
            iterations: r.iterations,
            final_residual: r.final_residual,
            lambda_spread: r.lambda_spread,
            rate_history: r.rate_history,
        },
    )?;
    Ok(EXIT_OK)
}

fn sidecar_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn early(run: &mut Run<'_>) -> Result<i32, Error> {
    let r = match run.solve()? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let c = run.config;
    let model = &run.model;
    let profile =
        early_turnpike_profile(model, &model.terminal, &r.s_star, c.horizon, c.epsilon, c.tie_tol)?;
    let e_star = equilibrium_set(model, &r.s_star, c.tie_tol)?;
    let csv = run.sidecar();
    profile_csv::write(&profile, &csv)?;
    let result = report::EarlyTurnpikeResult {
        index_convention: report::INDEX_CONVENTION,
        lambda: r.lambda,
        stationary_equilibrium: report::equilibrium_labels(model, &e_star),
        metric: if model.actions.has_coords() {
            "euclidean"
        } else {
            "discrete"
        },
        m: profile.m,
        window: profile.window,
        distances: profile.per_step_distance.clone(),
        profile_csv: sidecar_name(&csv),
    };
    run.write(Status::Ok, result)?;
    Ok(EXIT_OK)
}

fn middle(run: &mut Run<'_>) -> Result<i32, Error> {
    let r = match run.solve()? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let c = run.config;
    let initial = c.initial_distribution(&run.model)?;
    let e_star = equilibrium_set(&run.model, &r.s_star, c.tie_tol)?;
    let stationary = match stationary_distribution(&run.model, &e_star, c.tol) {
        Ok(s) => s,
        Err(turnpike_core::Error::NoConvergence {
            iterations,
            residual,
            best,
        }) => {
            run.write(
                Status::NoConvergence,
                report::NoConvergenceReport {
                    error: format!("stationary distribution did not converge after {iterations} steps"),
                    iterations,
                    best_residual: residual,
                    best_iterate: best.into_inner(),
                },
            )?;
            return Ok(EXIT_NO_CONVERGENCE);
        }
        Err(e) => return Err(e.into()),
    };
    for w in &stationary.warnings {
        eprintln!("warning: {w}");
        run.warnings.push(w.to_string());
    }
    let model = &run.model;
    let q_star = stationary.distribution;
    let (profile, _) = middle_turnpike_profile(
        model,
        &model.terminal,
        &q_star,
        c.horizon,
        &initial,
        c.epsilon,
        c.tie_tol,
    )?;
    let csv = run.sidecar();
    profile_csv::write(&profile, &csv)?;
    let result = report::MiddleTurnpikeResult {
        index_convention: report::INDEX_CONVENTION,
        lambda: r.lambda,
        stationary_equilibrium: report::equilibrium_labels(model, &e_star),
        q_star: q_star.to_vec(),
        m: profile.m,
        window: profile.window,
        max_distance_in_window: profile.max_distance_in_window(),
        distances: profile.per_step_distance.clone(),
        profile_csv: sidecar_name(&csv),
    };
    run.write(Status::Ok, result)?;
    Ok(EXIT_OK)
}

fn simulate(run: &mut Run<'_>) -> Result<i32, Error> {
    let r = match run.solve()? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let c = run.config;
    let initial = c.initial_distribution(&run.model)?;
    let model = &run.model;
    let rollout = rollout_from(model, &model.terminal, c.horizon, &initial, c.n, c.seed, c.tie_tol)?;
    let result = report::SimulateResult {
        lambda_hat: rollout.lambda_hat(c.horizon),
        occupation: rollout.occupation,
        n: c.n,
        seed: c.seed,
        horizon: c.horizon,
        lambda: r.lambda,
    };
    run.write(Status::Ok, result)?;
    Ok(EXIT_OK)
}

fn oracle_check(run: &mut Run<'_>) -> Result<i32, Error> {
    let r = match run.solve()? {
        Ok(r) => r,
        Err(code) => return Ok(code),
    };
    let c = run.config;
    let model = &run.model;
    let terminal = &model.terminal;
    // Validates the work guard before any iteration.
    let last = oracle_game_value(model, terminal, c.horizon)?;
    let previous = oracle_game_value(model, terminal, c.horizon - 1)?;
    let mut agree = true;
    let mut diffs = Vec::with_capacity(c.horizon);
    let mut iterate = terminal.clone();
    for t in 1..=c.horizon {
        iterate = iterate_bellman(model, &iterate, 1)?;
        let oracle = oracle_game_value(model, terminal, t)?;
        let diff = sup_distance(&iterate, &oracle)?;
        let scale = iterate.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        agree &= diff <= ORACLE_TOLERANCE * scale;
        diffs.push(diff);
    }
    let lambda_extrapolated = last
        .iter()
        .zip(previous.iter())
        .map(|(a, b)| a - b)
        .sum::<f64>()
        / model.n_states() as f64;
    let status = if agree { Status::Ok } else { Status::CheckFailed };
    run.write(
        status,
        report::OracleCheckResult {
            agree,
            tolerance: ORACLE_TOLERANCE,
            max_abs_difference: diffs,
            lambda: r.lambda,
            lambda_extrapolated,
        },
    )?;
    Ok(if agree { EXIT_OK } else { EXIT_INVALID })
}
