mod commands;
mod load;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

/// Acting with hierarchical task networks: run the agent loop, enumerate plans, check properties.
#[derive(Parser, Debug)]
#[command(name = "htnact", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the acting loop and write the trace as JSON.
    Act(ActArgs),
    /// List the HTN solutions reachable within a reduction depth.
    Plan(PlanArgs),
    /// Run a verification suite and report PASS or FAIL.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Default,
    Random,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Extendability,
    Equivalence,
    ActingOnly,
    Jumps,
    DtraceSoundness,
    Elimination,
}

#[derive(Args, Debug)]
pub struct StrategyArgs {
    /// Execution strategy; defaults to `random` when a seed is given.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyKind>,
    /// Seed for the random strategy.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ActArgs {
    /// Domain file (.htn).
    pub domain: PathBuf,
    /// Problem file (.prob).
    pub problem: PathBuf,
    /// Scenario file (.evt); its tasks replace those of the problem.
    pub scenario: Option<PathBuf>,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Read observed tasks from standard input, one line per iteration.
    #[arg(long, conflicts_with = "scenario")]
    pub interactive: bool,
    /// Follow the directives in this file before falling back to the strategy.
    #[arg(long)]
    pub choices: Option<PathBuf>,
    /// Iteration budget of the loop.
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
    /// Write the trace here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    pub domain: PathBuf,
    pub problem: PathBuf,
    /// Maximum nesting of method reductions.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Domain file; omit together with the problem when using --random.
    pub domain: Option<PathBuf>,
    pub problem: Option<PathBuf>,
    /// Scenario for the d-trace suite.
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Check this many generated problems instead of the given files, starting at --seed.
    #[arg(long, conflicts_with_all = ["domain", "problem", "scenario"])]
    pub random: Option<usize>,
    /// Reduction depth for the acting-only suite.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Comma-separated task sequence the jumps suite should examine.
    #[arg(long)]
    pub target: Option<String>,
    /// Iteration budget per d-trace.
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Failure::INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Act(a) => commands::act(&a),
        Command::Plan(p) => commands::plan(&p),
        Command::Verify(v) => commands::verify(&v),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
