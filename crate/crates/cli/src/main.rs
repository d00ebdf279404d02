use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use endnet_cli::commands::{run, CliError, RunContext};
use endnet_cli::config::{parse_run_config, CommandKind};

/// Solver, enumerator, and simulator for network games with endogenous
/// link formation.
#[derive(Parser)]
#[command(name = "endnet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium actions and payoffs on a fixed graph.
    Solve(RunArgs),
    /// Every stable outcome of the configured game.
    Enumerate(RunArgs),
    /// Stability and structure of one outcome.
    Classify(RunArgs),
    /// Adjustment dynamics: uncoordinated additions or Poisson revisions.
    Dynamics(RunArgs),
    /// Closed-form threshold conditions for the configured family.
    Thresholds(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.txt and machine outputs.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for enumeration.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed override for randomized commands.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Solve(a) => (CommandKind::Solve, a),
        Command::Enumerate(a) => (CommandKind::Enumerate, a),
        Command::Classify(a) => (CommandKind::Classify, a),
        Command::Dynamics(a) => (CommandKind::Dynamics, a),
        Command::Thresholds(a) => (CommandKind::Thresholds, a),
    };
    match execute(kind, args) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(kind: CommandKind, args: &RunArgs) -> Result<String, CliError> {
    let config_text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config =
        parse_run_config(&config_text).map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(declared) = config.command {
        if declared != kind {
            return Err(CliError::Validation(format!(
                "config declares command `{}` but `{}` was invoked",
                declared.name(),
                kind.name()
            )));
        }
    }
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    let jobs = args
        .jobs
        .or(config.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get().min(8)))
        .max(1);
    let ctx = RunContext {
        command: kind,
        config,
        config_text,
        config_path: args.config.clone(),
        out_dir: args.out.clone(),
        jobs,
    };
    run(&ctx)
}
