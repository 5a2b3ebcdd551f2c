//! Parameter sweeps. One CSV row per (n, alpha, kind, peephole, seed) in
//! config order; rows are written and flushed chunk by chunk so an
//! interrupted run keeps everything finished so far.
//!
//! The first line is the version tag `# atomshuttle-csv v1`, then the
//! header with the columns of [`RunRecord`] in declaration order.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use atomshuttle::cost::plan_metrics;
use atomshuttle::decompose::{PlanOptions, Strategy, StrategyChoice};
use atomshuttle::format::{InstanceFile, PlanFile};
use atomshuttle::instance::{generate_instance, ProblemKind};
use atomshuttle::{apply_plan, CostParams, ShuttleOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{to_json, CliError};
use crate::BenchArgs;

pub const CSV_VERSION: &str = "# atomshuttle-csv v1";
const LARGE_SIDE: usize = 256;

fn default_seed() -> u64 {
    std::env::var("ATOMSHUTTLE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

fn default_peephole() -> Vec<bool> {
    vec![true]
}

fn default_t1() -> f64 {
    120.0
}

fn default_t2() -> f64 {
    35.0
}

fn default_seeds() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub n: Vec<usize>,
    pub alpha: Vec<f64>,
    pub kind: Vec<String>,
    /// Seeds per cell: `seed, seed + 1, …`.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub strategy: Option<String>,
    #[serde(default = "default_peephole")]
    pub peephole: Vec<bool>,
    #[serde(default)]
    pub prune_empty: bool,
    #[serde(default = "default_t1")]
    pub t1: f64,
    #[serde(default = "default_t2")]
    pub t2: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub atoms: usize,
    pub alpha: f64,
    pub seed: u64,
    pub kind: &'static str,
    pub strategy_used: &'static str,
    pub success: bool,
    pub op_count: usize,
    pub total_transport_cost: f64,
    pub estimated_time_us: f64,
    pub avg_atoms_per_op: f64,
    pub avg_distance_per_atom: f64,
    pub avg_ops_per_atom: f64,
    pub planning_time_us: f64,
    pub three_step_used: bool,
    pub peephole_enabled: bool,
}

#[derive(Debug, Clone, Copy)]
struct Task {
    n: usize,
    alpha: f64,
    kind: ProblemKind,
    peephole: bool,
    seed: u64,
}

struct Sweep {
    tasks: Vec<Task>,
    strategy: StrategyChoice,
    prune_empty: bool,
    params: CostParams,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn expand(cfg: &BenchConfig, allow_large: bool) -> Result<Sweep, CliError> {
    if cfg.seeds == 0 {
        return Err(usage("seeds must be at least 1"));
    }
    if cfg.n.is_empty() || cfg.alpha.is_empty() || cfg.kind.is_empty() || cfg.peephole.is_empty() {
        return Err(usage("n, alpha, kind and peephole lists must be nonempty"));
    }
    if let Some(&n) = cfg.n.iter().find(|&&n| n < 2) {
        return Err(usage(format!("lattice side {n} is below 2")));
    }
    if let Some(&n) = cfg.n.iter().find(|&&n| n > LARGE_SIDE && !allow_large) {
        return Err(usage(format!("lattice side {n} exceeds {LARGE_SIDE}; pass --allow-large")));
    }
    if let Some(&a) = cfg.alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(usage(format!("alpha {a} is outside [0, 1]")));
    }
    let kinds = cfg
        .kind
        .iter()
        .map(|k| k.parse::<ProblemKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(e.to_string()))?;
    let strategy = match &cfg.strategy {
        None => StrategyChoice::Auto,
        Some(s) => s.parse().map_err(usage)?,
    };
    let params = CostParams::new(cfg.t1, cfg.t2).map_err(|e| usage(e.to_string()))?;
    let mut tasks = Vec::new();
    for &n in &cfg.n {
        for &alpha in &cfg.alpha {
            for &kind in &kinds {
                for &peephole in &cfg.peephole {
                    for s in 0..cfg.seeds as u64 {
                        tasks.push(Task { n, alpha, kind, peephole, seed: cfg.seed.wrapping_add(s) });
                    }
                }
            }
        }
    }
    Ok(Sweep { tasks, strategy, prune_empty: cfg.prune_empty, params })
}

fn stem(t: &Task) -> String {
    format!(
        "{}_n{}_a{}_s{}{}",
        t.kind.as_str(),
        t.n,
        t.alpha,
        t.seed,
        if t.peephole { "" } else { "_nopeep" }
    )
}

fn run_task(t: &Task, sweep: &Sweep, save: Option<&Path>) -> Result<RunRecord, CliError> {
    let inst = generate_instance(t.n, t.alpha, t.seed, t.kind)?;
    let opts = PlanOptions {
        strategy: sweep.strategy,
        shuttle: ShuttleOptions { peephole: t.peephole, drop_empty: sweep.prune_empty },
    };
    let start = Instant::now();
    let planned = atomshuttle::plan(&inst, &opts);
    let planning_time_us = start.elapsed().as_secs_f64() * 1e6;
    let mut rec = RunRecord {
        n: t.n,
        atoms: inst.atom_count(),
        alpha: t.alpha,
        seed: t.seed,
        kind: t.kind.as_str(),
        strategy_used: "none",
        success: false,
        op_count: 0,
        total_transport_cost: 0.0,
        estimated_time_us: 0.0,
        avg_atoms_per_op: 0.0,
        avg_distance_per_atom: 0.0,
        avg_ops_per_atom: 0.0,
        planning_time_us,
        three_step_used: false,
        peephole_enabled: t.peephole,
    };
    let Ok(planned) = planned else {
        return Ok(rec);
    };
    rec.strategy_used = planned.report.strategy_used.as_str();
    rec.three_step_used = planned.report.strategy_used == Strategy::ThreeStep;
    rec.success = apply_plan(inst.initial(), &planned.plan).is_ok_and(|g| inst.accepts(&g));
    if let Ok(m) = plan_metrics(inst.initial(), &planned.plan, sweep.params) {
        rec.op_count = m.op_count;
        rec.total_transport_cost = m.total_transport_cost;
        rec.estimated_time_us = m.estimated_time_us;
        rec.avg_atoms_per_op = m.avg_atoms_per_op;
        rec.avg_distance_per_atom = m.avg_distance_per_atom;
        rec.avg_ops_per_atom = m.avg_ops_per_atom;
    }
    if let Some(dir) = save {
        let base = stem(t);
        let write = |ext: &str, text: String| {
            let p = dir.join(format!("{base}.{ext}"));
            fs::write(&p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        };
        write("instance.json", to_json(&InstanceFile::from_instance(&inst)))?;
        write("plan.json", to_json(&PlanFile::from_plan(&planned.plan)))?;
    }
    Ok(rec)
}

pub fn run(a: &BenchArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.config)
        .map_err(|source| CliError::Io { path: a.config.display().to_string(), source })?;
    let cfg: BenchConfig =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", a.config.display())))?;
    let sweep = expand(&cfg, a.allow_large)?;
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    if let Some(dir) = &a.save_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    }
    let out_path = a.out.clone().or(cfg.output.clone());
    let sink: Box<dyn Write> = match &out_path {
        Some(p) => Box::new(
            fs::File::create(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let out_name = out_path.as_ref().map_or("<stdout>".to_string(), |p| p.display().to_string());
    let io = |source| CliError::Io { path: out_name.clone(), source };

    let mut sink = BufWriter::new(sink);
    writeln!(sink, "{CSV_VERSION}").map_err(io)?;
    let mut csv = csv::Writer::from_writer(sink);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let save = a.save_dir.as_deref();
    for chunk in sweep.tasks.chunks(a.jobs * 4) {
        let records: Vec<Result<RunRecord, CliError>> =
            pool.install(|| chunk.par_iter().map(|t| run_task(t, &sweep, save)).collect());
        for rec in records {
            csv.serialize(rec?).map_err(|e| io(e.into()))?;
        }
        csv.flush().map_err(io)?;
    }
    Ok(())
}
