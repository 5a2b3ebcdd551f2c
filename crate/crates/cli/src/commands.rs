use std::fs;
use std::io::Write;
use std::path::Path;

use atomshuttle::cost::{cost_general, plan_metrics, run_general, transport_cost, GeneralPlanError, lift_simple_to_general};
use atomshuttle::decompose::{PlanOptions, StrategyFailure};
use atomshuttle::format::{FormatError, InstanceFile, LoadedPlan, PlanFile, ReportFile};
use atomshuttle::instance::{generate_instance, Goal, InstanceError, ProblemInstance};
use atomshuttle::verify::find_grid_anchor;
use atomshuttle::{apply_plan, CostParams, Geometry, PlanError, ShuttleOptions};
use serde::Serialize;
use thiserror::Error;

use crate::{CostArgs, EvalArgs, GenArgs, PlanArgs, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("strategy failed ({code}): {failure}", code = .0.code(), failure = .0)]
    Strategy(StrategyFailure),
    #[error("plan faults at op {op}: {fault}", op = .0.index + 1, fault = .0.error)]
    Move(PlanError),
    #[error("general plan violates a constraint at {0}")]
    Constraint(GeneralPlanError),
    #[error("final geometry rejected: {0}")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Format { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Strategy(_) => 3,
            CliError::Move(_) | CliError::Constraint(_) => 4,
            CliError::Rejected(_) => 5,
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn format_err(path: &Path) -> impl FnOnce(FormatError) -> CliError + '_ {
    move |source| CliError::Format { path: path.display().to_string(), source }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| format_err(path)(e.into()))?;
    file.to_instance().map_err(format_err(path))
}

pub fn read_plan(path: &Path) -> Result<LoadedPlan, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file: PlanFile = serde_json::from_str(&text).map_err(|e| format_err(path)(e.into()))?;
    file.load().map_err(format_err(path))
}

fn params(c: CostArgs) -> CostParams {
    CostParams::new(c.t1, c.t2).expect("validated by the argument parser")
}

pub fn gen(a: &GenArgs) -> Result<(), CliError> {
    let inst = generate_instance(a.n, a.alpha, a.seed, a.kind)?;
    emit(a.out.as_deref(), &to_json(&InstanceFile::from_instance(&inst)))
}

#[derive(Serialize)]
struct Failure<'a> {
    error: &'static str,
    reason: &'static str,
    message: String,
    strategy: &'a str,
}

pub fn plan(a: &PlanArgs) -> Result<(), CliError> {
    let inst = read_instance(&a.instance)?;
    let opts = PlanOptions {
        strategy: a.strategy,
        shuttle: ShuttleOptions {
            peephole: !a.no_peephole,
            drop_empty: a.prune_empty,
        },
    };
    let start = std::time::Instant::now();
    let planned = match atomshuttle::plan(&inst, &opts) {
        Ok(p) => p,
        Err(e) => {
            let failure = Failure {
                error: "strategy_failed",
                reason: e.code(),
                message: e.to_string(),
                strategy: &format!("{:?}", a.strategy).to_lowercase(),
            };
            println!("{}", serde_json::to_string(&failure).expect("plain data"));
            return Err(CliError::Strategy(e));
        }
    };
    let elapsed = start.elapsed();
    let mut metrics = plan_metrics(inst.initial(), &planned.plan, params(a.cost)).map_err(CliError::Move)?;
    metrics.planning_time_us = elapsed.as_secs_f64() * 1e6;
    let report = to_json(&ReportFile::new(&planned.report, metrics));
    emit(a.out.as_deref(), &to_json(&PlanFile::from_plan(&planned.plan)))?;
    match &a.report {
        Some(p) => fs::write(p, report).map_err(io_err(p)),
        None => {
            eprint!("{report}");
            Ok(())
        }
    }
}

/// Why the instance's verifier refused `final_geom`.
fn rejection(inst: &ProblemInstance, final_geom: &Geometry) -> Option<String> {
    if inst.accepts(final_geom) {
        return None;
    }
    Some(match inst.goal() {
        Goal::Arbitrary(t) => match final_geom.first_difference(t) {
            Some(site) => format!(
                "site {site} is {} but the target has it {}",
                if final_geom.get(site.row, site.col) { "occupied" } else { "empty" },
                if t.get(site.row, site.col) { "occupied" } else { "empty" },
            ),
            None => "geometry differs from the target".into(),
        },
        Goal::Grid => {
            let side = inst.grid_side();
            debug_assert!(find_grid_anchor(final_geom, inst.atom_count()).is_none());
            format!("no fully occupied {side}x{side} block")
        }
    })
}

fn simulate(inst: &ProblemInstance, plan: &LoadedPlan) -> Result<Geometry, CliError> {
    match plan {
        LoadedPlan::Simple(p) => apply_plan(inst.initial(), p).map_err(CliError::Move),
        LoadedPlan::General(g) => run_general(inst.initial(), g).map_err(CliError::Constraint),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let inst = read_instance(&a.instance)?;
    let plan = read_plan(&a.plan)?;
    let final_geom = simulate(&inst, &plan)?;
    if let Some(why) = rejection(&inst, &final_geom) {
        return Err(CliError::Rejected(why));
    }
    println!("ok");
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    model: &'static str,
    op_count: usize,
    total_transport_cost: f64,
    estimated_time_us: f64,
    t1: f64,
    t2: f64,
}

pub fn eval(a: &EvalArgs) -> Result<(), CliError> {
    let inst = read_instance(&a.instance)?;
    let plan = read_plan(&a.plan)?;
    let params = params(a.cost);
    simulate(&inst, &plan)?;
    let gops = match plan {
        LoadedPlan::Simple(p) => lift_simple_to_general(&p),
        LoadedPlan::General(g) => g,
    };
    let time = cost_general(&gops, params, a.model, None).map_err(CliError::Constraint)?;
    let report = EvalReport {
        model: match a.model {
            atomshuttle::CostModel::Linear => "linear",
            atomshuttle::CostModel::Sqrt => "sqrt",
        },
        op_count: gops.len(),
        total_transport_cost: transport_cost(&gops, a.model),
        estimated_time_us: time,
        t1: params.t1(),
        t2: params.t2(),
    };
    emit(None, &to_json(&report))
}
