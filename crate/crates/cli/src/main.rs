use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use turnpike_cli::run::{self, Command, RunConfig, EXIT_IO};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Validate,
    Certify,
    Solve,
    EarlyTurnpike,
    MiddleTurnpike,
    Simulate,
    OracleCheck,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Validate => Command::Validate,
            CommandArg::Certify => Command::Certify,
            CommandArg::Solve => Command::Solve,
            CommandArg::EarlyTurnpike => Command::EarlyTurnpike,
            CommandArg::MiddleTurnpike => Command::MiddleTurnpike,
            CommandArg::Simulate => Command::Simulate,
            CommandArg::OracleCheck => Command::OracleCheck,
        }
    }
}

/// Average-cost solver and turnpike checks for finite zero-sum Markov games.
#[derive(Debug, Parser)]
#[command(name = "turnpike", version)]
struct Cli {
    command: CommandArg,
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Report file (JSON); profile CSVs are written next to it.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 100)]
    horizon: usize,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-9)]
    tie_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of simulated trajectories.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Initial state label, or "uniform".
    #[arg(long, default_value = "uniform")]
    initial: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let config = RunConfig {
        command: cli.command.into(),
        model_path: cli.model,
        output_path: cli.out,
        tol: cli.tol,
        max_iter: cli.max_iter,
        horizon: cli.horizon,
        epsilon: cli.epsilon,
        tie_tol: cli.tie_tol,
        seed: cli.seed,
        n: cli.n,
        initial: cli.initial,
    };
    ExitCode::from(run::run(&config) as u8)
}
