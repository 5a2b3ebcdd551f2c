use std::path::PathBuf;
use std::process::ExitCode;

use atomshuttle::decompose::StrategyChoice;
use atomshuttle::instance::ProblemKind;
use atomshuttle::CostModel;
use clap::{Args, Parser, Subcommand};

mod bench;
mod commands;

/// Plan, check and benchmark atom-array reconfiguration with row/column
/// lattice shifts.
#[derive(Parser)]
#[command(name = "atomshuttle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a problem instance.
    Gen(GenArgs),
    /// Plan an instance; writes the plan and a report.
    Plan(PlanArgs),
    /// Replay a plan and run the instance's verifier.
    Verify(VerifyArgs),
    /// Score a plan under a cost model.
    Eval(EvalArgs),
    /// Run a parameter sweep and stream CSV rows.
    Bench(BenchArgs),
}

fn probability(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&a) {
        Ok(a)
    } else {
        Err(format!("{a} is outside [0, 1]"))
    }
}

fn positive_side(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("side must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_time(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        Ok(t) => Err(format!("{t} is not a positive time")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args)]
pub struct GenArgs {
    /// Lattice side.
    #[arg(long, value_parser = positive_side)]
    pub n: usize,
    /// Per-site fill probability.
    #[arg(long, value_parser = probability, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, env = "ATOMSHUTTLE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// `grid` or `arbitrary`.
    #[arg(long, default_value = "grid")]
    pub kind: ProblemKind,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
pub struct CostArgs {
    /// Microseconds per capture/release cycle.
    #[arg(long, value_parser = positive_time, default_value_t = 120.0)]
    pub t1: f64,
    /// Microseconds per unit of transport.
    #[arg(long, value_parser = positive_time, default_value_t = 35.0)]
    pub t2: f64,
}

#[derive(Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// `auto`, `grid`, `two-step` or `three-step`.
    #[arg(long, default_value = "auto")]
    pub strategy: StrategyChoice,
    /// Keep every delivery op instead of pruning settled columns.
    #[arg(long)]
    pub no_peephole: bool,
    /// Drop alignment ops that select no rows.
    #[arg(long)]
    pub prune_empty: bool,
    /// Plan output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report output path; stderr when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub cost: CostArgs,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    /// `linear` or `sqrt`.
    #[arg(long, default_value = "linear")]
    pub model: CostModel,
    #[command(flatten)]
    pub cost: CostArgs,
}

#[derive(Args)]
pub struct BenchArgs {
    /// JSON sweep description.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output path; overrides the config, stdout when neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; rows are identical for any value.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Also write each instance and plan as JSON under this directory.
    #[arg(long)]
    pub save_dir: Option<PathBuf>,
    /// Permit lattice sides above 256.
    #[arg(long)]
    pub allow_large: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Plan(a) => commands::plan(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Bench(a) => bench::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("atomshuttle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
