use std::path::PathBuf;
use std::process::ExitCode;

use bellcorr_cli::{parse_scenario, run_scenario, CliError, Task};
use clap::{Args, Parser, Subcommand};

/// Maximal Bell correlations for commuting operator algebras.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal Bell correlation of a state on a pair of algebras.
    Beta(Common),
    /// State-independent invariant bracketed from both sides.
    Invariant(Common),
    /// Clustering bounds and, optionally, a bound check for a state.
    Cluster(Common),
    /// Bell correlation against region separation on an Ising chain.
    Chain(Common),
    /// Clustering bound checks over a family of two-qubit states.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; defaults to the scenario's `output` or `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(task: Task, args: &Common) -> Result<i32, CliError> {
    let text = std::fs::read(&args.scenario)
        .map_err(|e| CliError::Config(vec![format!("{}: {e}", args.scenario.display())]))?;
    let mut scenario = parse_scenario(&text)?;
    if scenario.task != task {
        return Err(CliError::Config(vec![format!(
            "task: scenario is `{}`, subcommand expects `{}`",
            scenario.task.name(),
            task.name()
        )]));
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| scenario.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let bundle = run_scenario(&scenario)?;
    bundle.write(&out)?;
    match &bundle.outcome {
        bellcorr_cli::run::Outcome::Success => {}
        bellcorr_cli::run::Outcome::Convergence(m) => eprintln!("convergence failure: {m}"),
        bellcorr_cli::run::Outcome::Violation(m) => eprintln!("invariant violation: {m}"),
    }
    Ok(bundle.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match &cli.command {
        Command::Beta(a) => (Task::Beta, a),
        Command::Invariant(a) => (Task::Invariant, a),
        Command::Cluster(a) => (Task::Cluster, a),
        Command::Chain(a) => (Task::ChainCurve, a),
        Command::Verify(a) => (Task::VerifySuite, a),
    };
    let code = execute(task, args).unwrap_or_else(|e| {
        eprintln!("{e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
