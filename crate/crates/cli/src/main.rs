//! `spinrl` — train, evaluate and benchmark a reinforcement-learning
//! eigensolver for small spin systems on a simulated noisy quantum
//! computer.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! runtime failures.

mod commands;
mod config;

use clap::{Parser, Subcommand};

use config::{BaselineArgs, EvalArgs, SumruleArgs, TrainArgs, VqeArgs};

/// Errors split by exit code: bad input versus failures during a run.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "spinrl",
    version,
    about = "Reinforcement-learning eigensolver for small spin systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an agent to build low-energy circuits
    Train(TrainArgs),
    /// Play evaluation episodes with a trained checkpoint
    Eval(EvalArgs),
    /// Reference energies: the known optimal circuit, or the variational solver
    Baseline(BaselineArgs),
    /// Variational eigensolver on the exchange dimer
    Vqe(VqeArgs),
    /// Append sum-rule diagnostics and corrected energies to a correlator CSV
    Sumrule(SumruleArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => commands::cmd_train(&config::TrainRun::resolve(&args)?),
        Command::Eval(args) => commands::cmd_eval(&config::EvalRun::resolve(&args)?),
        Command::Baseline(args) => commands::cmd_baseline(&config::BaselineRun::resolve(&args)?),
        Command::Vqe(args) => commands::cmd_vqe(&config::VqeRun::resolve(&args)?),
        Command::Sumrule(args) => commands::cmd_sumrule(&config::SumruleRun::resolve(&args)?),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // `--help` and `--version` land here too; only real parse
            // errors use stderr and a failing code.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
