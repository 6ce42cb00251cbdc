//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use turnpike_core::bellman::{apply_bellman, equilibrium_set, iterate_bellman};
use turnpike_core::quotient::{quotient_distance, sup_distance, sup_norm};
use turnpike_core::sim::{oracle_game_value, rollout};
use turnpike_core::solver::{average_cost_run, convergence_report, ENVELOPE_SLACK, GAP_SLACK};
use turnpike_core::turnpike::{
    early_turnpike_profile, middle_turnpike_profile, stationary_distribution,
};
use turnpike_core::{
    fixtures, minorization_search, solve, solve_from, validate, GameModel, SolveOptions,
    StateDistribution,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * (2.0 * unit(rng) - 1.0)).collect()
}

fn range(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Certified fixtures whose stationary equilibrium is unique at every state.
fn unique_certified() -> Vec<(&'static str, GameModel)> {
    fixtures::certified()
        .into_iter()
        .filter(|(_, m)| {
            let r = solve(m, SolveOptions::default()).unwrap();
            equilibrium_set(m, &r.s_star, 1e-9).unwrap().is_unique()
        })
        .collect()
}

/// Homogeneity, non-expansiveness and contraction of the operator.
fn operator_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut homogeneity, mut expansion, mut worst_ratio_gap) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut certified = 0;
    for i in 0..50u64 {
        let n = range(&mut rng, 2, 10);
        let (nu, nv) = (range(&mut rng, 2, 4), range(&mut rng, 2, 4));
        let model = fixtures::random_game(1000 + i, n, nu, nv, i % 3 == 2);
        check(validate(&model).is_valid(), || format!("model {i} invalid"))?;
        let cert = minorization_search(&model);
        certified += cert.is_some() as usize;
        let values: Vec<Vec<f64>> = (0..20).map(|_| random_values(&mut rng, n, 10.0)).collect();
        let images: Vec<_> = values.iter().map(|s| apply_bellman(&model, s).unwrap()).collect();
        for (k, s) in values.iter().enumerate() {
            let a = 20.0 * unit(&mut rng) - 10.0;
            let shifted: Vec<f64> = s.iter().map(|v| v + a).collect();
            let b = apply_bellman(&model, &shifted).unwrap();
            for (x, y) in b.iter().zip(images[k].iter()) {
                homogeneity = homogeneity.max((x - (y + a)).abs());
            }
            for (j, s2) in values.iter().enumerate().skip(k + 1) {
                let lhs = sup_distance(&images[k], &images[j]).unwrap();
                expansion = expansion.max(lhs - sup_distance(s, s2).unwrap());
                if let Some(c) = &cert {
                    let d = quotient_distance(s, s2).unwrap();
                    if d > 0.0 {
                        let ratio = quotient_distance(&images[k], &images[j]).unwrap() / d;
                        worst_ratio_gap = worst_ratio_gap.max(ratio - c.contraction_factor);
                    }
                }
            }
        }
    }
    check(homogeneity <= 1e-10, || format!("homogeneity error {homogeneity:e}"))?;
    check(expansion <= 1e-10, || format!("expansion {expansion:e}"))?;
    check(worst_ratio_gap <= 1e-9, || format!("contraction ratio exceeds factor by {worst_ratio_gap:e}"))?;
    check(certified > 0, || "no certified model sampled".into())?;
    Ok(format!(
        "homogeneity {homogeneity:.1e}, max ratio - factor {worst_ratio_gap:.2e} over {certified} certified models"
    ))
}

/// T-fold operator against the independent oracle, T = 1..=6.
fn oracle_equivalence() -> Outcome {
    let mut models = vec![fixtures::tiny_a()];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..10u64 {
        let n = range(&mut rng, 2, 3);
        models.push(fixtures::random_game(2000 + i, n, 2, 2, i % 2 == 1));
    }
    let mut worst = 0.0f64;
    for model in &models {
        for t in 1..=6 {
            let fast = iterate_bellman(model, &model.terminal, t).unwrap();
            let oracle = oracle_game_value(model, &model.terminal, t).unwrap();
            worst = worst.max(sup_distance(&fast, &oracle).unwrap());
        }
    }
    check(worst <= 1e-12, || format!("max difference {worst:e}"))?;
    Ok(format!("max difference {worst:.1e} over {} models", models.len()))
}

/// Uniqueness, gap bound and geometric convergence on certified fixtures.
fn average_cost_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = SolveOptions::default();
    let mut notes = Vec::new();
    for (name, model) in fixtures::certified() {
        let n = model.n_states();
        let reference = solve(&model, opts).map_err(|e| format!("{name}: {e}"))?;
        let mut lambdas = vec![reference.lambda];
        let mut spread_s = 0.0f64;
        let mut inits = vec![model.terminal.to_vec()];
        for _ in 0..10 {
            let init = random_values(&mut rng, n, 20.0);
            let r = solve_from(&model, &init, opts).map_err(|e| format!("{name}: {e}"))?;
            lambdas.push(r.lambda);
            spread_s = spread_s.max(quotient_distance(&r.s_star, &reference.s_star).unwrap());
            inits.push(init);
        }
        let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
        check(hi - lo <= 1e-8, || format!("{name}: lambda spread {:e}", hi - lo))?;
        check(spread_s <= 1e-8, || format!("{name}: s* spread {spread_s:e}"))?;

        let mut tightest = f64::INFINITY;
        for init in &inits {
            let run = average_cost_run(&model, &reference, init, 200).unwrap();
            for step in &run.steps {
                check(step.gap <= run.bound + GAP_SLACK, || {
                    format!("{name}: gap {} > bound {} at t={}", step.gap, run.bound, step.t)
                })?;
                tightest = tightest.min(run.bound - step.gap);
            }
            let conv = convergence_report(&model, &reference, init, 200).unwrap();
            for step in &conv.steps {
                check(step.distance <= step.envelope + ENVELOPE_SLACK, || {
                    format!("{name}: d_t {} > envelope {} at t={}", step.distance, step.envelope, step.t)
                })?;
            }
        }
        notes.push(format!("{name} λ={:.6} spread {:.0e}", reference.lambda, hi - lo));
    }
    Ok(notes.join("; "))
}

/// Strategy sets equal the stationary ones before the last M steps.
fn early_turnpike() -> Outcome {
    let horizon = 100;
    let mut notes = Vec::new();
    let fixtures = unique_certified();
    check(fixtures.len() == 3, || "fixture lost uniqueness".into())?;
    for (name, model) in fixtures {
        let r = solve(&model, SolveOptions::default()).unwrap();
        let p = early_turnpike_profile(&model, &model.terminal, &r.s_star, horizon, 0.0, 1e-9).unwrap();
        let m = p.m.expect("early M is always defined");
        check(m <= 20, || format!("{name}: M = {m}"))?;
        check(p.per_step_distance[..horizon - m].iter().all(|d| *d == 0.0), || {
            format!("{name}: nonzero distance before T - M")
        })?;
        let fixed = early_turnpike_profile(&model, &r.s_star, &r.s_star, horizon, 0.0, 1e-9).unwrap();
        check(fixed.m == Some(0), || format!("{name}: terminal = s* gives M = {:?}", fixed.m))?;
        notes.push(format!("{name} M={m}"));
    }
    Ok(notes.join(", "))
}

/// State distributions stay within epsilon of Q* on [M, T − M].
fn middle_turnpike() -> Outcome {
    let horizon = 100;
    let epsilon = 0.01;
    let mut notes = Vec::new();
    for (name, model) in unique_certified() {
        let n = model.n_states();
        let r = solve(&model, SolveOptions::default()).unwrap();
        let e_star = equilibrium_set(&model, &r.s_star, 1e-9).unwrap();
        let q_star = stationary_distribution(&model, &e_star, 1e-14).unwrap().distribution;
        let mut starts = vec![StateDistribution::uniform(n)];
        starts.extend((0..n).map(|x| StateDistribution::point(n, x)));
        let mut worst_m = 0;
        for initial in &starts {
            let (p, _) = middle_turnpike_profile(&model, &model.terminal, &q_star, horizon, initial, epsilon, 1e-9)
                .unwrap();
            let m = p.m.ok_or_else(|| format!("{name}: empty window from {:?}", initial.probs()))?;
            check(m <= 25, || format!("{name}: M = {m}"))?;
            let max_in = p.max_distance_in_window().unwrap();
            check(max_in <= epsilon, || format!("{name}: tv {max_in} in window"))?;
            worst_m = worst_m.max(m);
        }
        notes.push(format!("{name} M≤{worst_m}"));
    }
    Ok(notes.join(", "))
}

/// Rollout occupation frequencies against Q*, and realized cost rate
/// against λ.
fn occupation_law() -> Outcome {
    let horizon = 60;
    let n_traj = 20_000;
    let mut notes = Vec::new();
    for (name, model) in unique_certified() {
        let n = model.n_states();
        let r = solve(&model, SolveOptions::default()).unwrap();
        let e_star = equilibrium_set(&model, &r.s_star, 1e-9).unwrap();
        let q_star = stationary_distribution(&model, &e_star, 1e-14).unwrap().distribution;
        let (profile, _) = middle_turnpike_profile(
            &model,
            &model.terminal,
            &q_star,
            horizon,
            &StateDistribution::point(n, 0),
            0.01,
            1e-9,
        )
        .unwrap();
        let (a, b) = profile.window.ok_or_else(|| format!("{name}: empty window"))?;
        let sim = rollout(&model, &model.terminal, horizon, 0, n_traj, 20_251_015, 1e-9).unwrap();
        let mut inside = 0;
        for t in a..=b {
            let ok = (0..n).all(|x| {
                let q = q_star[x];
                let envelope = 3.0 * (q * (1.0 - q) / n_traj as f64).sqrt() + 0.005;
                (sim.occupation[t][x] - q).abs() <= envelope
            });
            inside += ok as usize;
        }
        let steps = b - a + 1;
        let share = inside as f64 / steps as f64;
        check(share >= 0.95, || format!("{name}: only {inside}/{steps} window steps inside the envelope"))?;

        let lambda_hat = sim.lambda_hat(horizon);
        let diff: Vec<f64> = model.terminal.iter().zip(r.s_star.iter()).map(|(a, b)| a - b).collect();
        let allowance = (sup_norm(&r.s_star) + sup_norm(&diff)) / horizon as f64
            + 3.0 * model.cost.bound / (n_traj as f64).sqrt();
        check((lambda_hat - r.lambda).abs() <= allowance, || {
            format!("{name}: lambda_hat {lambda_hat} vs {} (allowance {allowance})", r.lambda)
        })?;
        notes.push(format!("{name} {inside}/{steps}, |λ̂-λ|={:.4}", (lambda_hat - r.lambda).abs()));
    }
    Ok(notes.join("; "))
}

/// Byte-identical CLI reports for repeated runs.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let model = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/tiny-a.json");
    let runs: [(&str, &[&str]); 2] = [
        ("solve", &["--tol", "1e-10"]),
        ("simulate", &["--horizon", "60", "--n", "2000", "--seed", "7"]),
    ];
    for (command, extra) in runs {
        let mut reports = Vec::new();
        for attempt in 0..2 {
            let out = dir.path().join(format!("{command}-{attempt}.json"));
            let status = Command::new(env!("CARGO_BIN_EXE_turnpike"))
                .arg(command)
                .arg("--model")
                .arg(&model)
                .arg("--out")
                .arg(&out)
                .args(extra)
                .status()
                .map_err(|e| e.to_string())?;
            check(status.success(), || format!("{command} exited with {status}"))?;
            reports.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        check(reports[0] == reports[1], || format!("{command} reports differ"))?;
    }
    Ok("solve and simulate reports byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 operator laws", Some(Duration::from_secs(10)), operator_laws),
        ("2 oracle equivalence", Some(Duration::from_secs(5)), oracle_equivalence),
        ("3 average-cost theorem", Some(Duration::from_secs(30)), average_cost_theorem),
        ("4 early turnpike", Some(Duration::from_secs(10)), early_turnpike),
        ("5 middle turnpike", Some(Duration::from_secs(10)), middle_turnpike),
        ("6 occupation law", Some(Duration::from_secs(60)), occupation_law),
        ("7 determinism", None, determinism),
    ];
    let mut failed = 0;
    for (name, limit, criterion) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(criterion)
            .unwrap_or_else(|_| Err("panicked".into()))
            .and_then(|detail| {
                let elapsed = start.elapsed();
                match limit {
                    Some(l) if elapsed > l => Err(format!("took {elapsed:?}, limit {l:?}")),
                    _ => Ok(detail),
                }
            });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
