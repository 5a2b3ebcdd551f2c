//! Splits a reconfiguration problem into row-wise and column-wise
//! shuttling tasks joined by intermediate geometries.
//!
//! Three strategies, cheapest first:
//!
//! * grid formation (grid goals only): `2(n − 1) + (L − 1)` ops with pruning;
//! * two-step, through a column- or row-finalized intermediate: `≤ 4(n − 1)`;
//! * three-step, through a row-balanced intermediate: `≤ 6(n − 1)`, never fails.

use std::fmt;

use thiserror::Error;

use crate::gale_ryser::{construct_geometry, gale_ryser_check, DegreeSpec};
use crate::geometry::Geometry;
use crate::instance::{Goal, ProblemInstance};
use crate::ops::Plan;
use crate::shuttle::{solve_1d, Axis, ShuttleError, ShuttleOptions};
use crate::verify::grid_side;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    GridFormation,
    TwoStepCfin,
    TwoStepRfin,
    ThreeStep,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::GridFormation => "grid",
            Strategy::TwoStepCfin => "two_step_cfin",
            Strategy::TwoStepRfin => "two_step_rfin",
            Strategy::ThreeStep => "three_step",
        }
    }

    /// Worst-case op count on an `n × n` lattice with `L = side`,
    /// assuming peephole pruning for the grid strategy.
    pub fn op_bound(self, n: usize, side: usize) -> usize {
        let m = n.saturating_sub(1);
        match self {
            Strategy::GridFormation => 2 * m + side.saturating_sub(1),
            Strategy::TwoStepCfin | Strategy::TwoStepRfin => 4 * m,
            Strategy::ThreeStep => 6 * m,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which strategies the dispatcher may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrategyChoice {
    #[default]
    Auto,
    Grid,
    TwoStep,
    ThreeStep,
}

impl std::str::FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(StrategyChoice::Auto),
            "grid" => Ok(StrategyChoice::Grid),
            "two-step" | "two_step" => Ok(StrategyChoice::TwoStep),
            "three-step" | "three_step" => Ok(StrategyChoice::ThreeStep),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlanOptions {
    pub strategy: StrategyChoice,
    pub shuttle: ShuttleOptions,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyFailure {
    #[error("only {available} atoms fit the first {side} columns, {side}x{side} needs {needed}")]
    InsufficientAtoms {
        side: usize,
        available: usize,
        needed: usize,
    },
    #[error("neither a column-finalized nor a row-finalized intermediate exists")]
    NoFinalizedIntermediate,
    #[error("grid formation needs a grid goal")]
    NotGridGoal,
    #[error(transparent)]
    Shuttle(#[from] ShuttleError),
}

impl StrategyFailure {
    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            StrategyFailure::InsufficientAtoms { .. } => "insufficient_atoms",
            StrategyFailure::NoFinalizedIntermediate => "no_finalized_intermediate",
            StrategyFailure::NotGridGoal => "not_grid_goal",
            StrategyFailure::Shuttle(_) => "shuttle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyReport {
    pub strategy_used: Strategy,
    /// Every strategy attempted, in order; the last one succeeded.
    pub fallbacks_tried: Vec<Strategy>,
    pub intermediates: Vec<(&'static str, Geometry)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planned {
    pub plan: Plan,
    /// The explicit geometry the plan produces.
    pub target: Geometry,
    pub report: StrategyReport,
}

/// Deals the atoms of each column round-robin over the rows, keeping one
/// counter across the whole sweep. Column sums are unchanged and row sums
/// end up within one of each other.
pub fn row_balance(geom: &Geometry) -> Geometry {
    let n = geom.n();
    let mut out = Geometry::empty(n).expect("side is nonzero");
    let mut t = 0;
    for j in 0..n {
        for i in 0..n {
            if geom.get(i, j) {
                out.set(t, j, true);
                t = (t + 1) % n;
            }
        }
    }
    out
}

/// Per row, deals up to `side` atoms round-robin over columns `0..side`
/// (one counter shared by all rows) and packs the rest right after the
/// row's share. Fails when fewer than `side²` atoms reach those columns.
pub fn grid_column_finalize(geom: &Geometry, side: usize) -> Result<Geometry, StrategyFailure> {
    let n = geom.n();
    let sums = geom.row_sums();
    let available: usize = sums.iter().map(|&r| r.min(side)).sum();
    if available < side * side {
        return Err(StrategyFailure::InsufficientAtoms {
            side,
            available,
            needed: side * side,
        });
    }
    let mut out = Geometry::empty(n).expect("side is nonzero");
    let mut t = 0;
    for (i, &r) in sums.iter().enumerate() {
        let l = r.min(side);
        for _ in 0..l {
            out.set(i, t, true);
            t = (t + 1) % side;
        }
        for j in l..r {
            out.set(i, j, true);
        }
    }
    Ok(out)
}

/// Packs every column of `geom` against row 0.
fn up_aligned(geom: &Geometry) -> Geometry {
    let sums = geom.col_sums();
    Geometry::from_fn(geom.n(), |i, j| i < sums[j]).expect("side is nonzero")
}

/// Explicit grid target: the `L × L` block at the top-left corner, then the
/// remaining atoms row-major over the other sites, starting to the right
/// of the block.
pub fn canonical_grid_target(n: usize, atoms: usize) -> Geometry {
    let side = grid_side(atoms);
    let mut out = Geometry::from_fn(n, |i, j| i < side && j < side).expect("side is nonzero");
    let outside = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i >= side || j >= side);
    for (i, j) in outside.take(atoms - side * side) {
        out.set(i, j, true);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutput {
    pub plan: Plan,
    pub target: Geometry,
    pub intermediates: Vec<(&'static str, Geometry)>,
}

/// Row-wise into the column-finalized geometry, then column-wise packing
/// of every column upward.
pub fn plan_grid_strategy(
    instance: &ProblemInstance,
    opts: ShuttleOptions,
) -> Result<StageOutput, StrategyFailure> {
    if instance.target().is_some() {
        return Err(StrategyFailure::NotGridGoal);
    }
    let initial = instance.initial();
    let cfin = grid_column_finalize(initial, instance.grid_side())?;
    let target = up_aligned(&cfin);
    let plan = solve_1d(initial, &cfin, Axis::RowWise, opts)?
        .then(solve_1d(&cfin, &target, Axis::ColumnWise, opts)?);
    Ok(StageOutput {
        plan,
        target,
        intermediates: vec![("cfin", cfin)],
    })
}

/// Tries a column-finalized intermediate (initial row sums, target column
/// sums), then a row-finalized one (target row sums, initial column sums).
pub fn plan_two_step(
    initial: &Geometry,
    target: &Geometry,
    opts: ShuttleOptions,
    tried: &mut Vec<Strategy>,
) -> Result<StageOutput, StrategyFailure> {
    tried.push(Strategy::TwoStepCfin);
    let cfin = DegreeSpec::new(initial.row_sums(), target.col_sums()).expect("sums of one side");
    if gale_ryser_check(&cfin) {
        let cfin = construct_geometry(&cfin).expect("checked feasible");
        let plan = solve_1d(initial, &cfin, Axis::RowWise, opts)?
            .then(solve_1d(&cfin, target, Axis::ColumnWise, opts)?);
        return Ok(StageOutput {
            plan,
            target: target.clone(),
            intermediates: vec![("cfin", cfin)],
        });
    }
    tried.push(Strategy::TwoStepRfin);
    let rfin = DegreeSpec::new(target.row_sums(), initial.col_sums()).expect("sums of one side");
    if gale_ryser_check(&rfin) {
        let rfin = construct_geometry(&rfin).expect("checked feasible");
        let plan = solve_1d(initial, &rfin, Axis::ColumnWise, opts)?
            .then(solve_1d(&rfin, target, Axis::RowWise, opts)?);
        return Ok(StageOutput {
            plan,
            target: target.clone(),
            intermediates: vec![("rfin", rfin)],
        });
    }
    Err(StrategyFailure::NoFinalizedIntermediate)
}

/// Column-wise into the row-balanced geometry, row-wise into a
/// column-finalized one, column-wise into the target. The middle
/// intermediate always exists because balanced row sums satisfy the
/// Gale–Ryser condition against any column sums with the same total.
pub fn plan_three_step(
    initial: &Geometry,
    target: &Geometry,
    opts: ShuttleOptions,
) -> Result<StageOutput, StrategyFailure> {
    let rbal = row_balance(initial);
    let spec = DegreeSpec::new(rbal.row_sums(), target.col_sums()).expect("sums of one side");
    let cfin = construct_geometry(&spec).expect("balanced row sums are always realizable");
    let plan = solve_1d(initial, &rbal, Axis::ColumnWise, opts)?
        .then(solve_1d(&rbal, &cfin, Axis::RowWise, opts)?)
        .then(solve_1d(&cfin, target, Axis::ColumnWise, opts)?);
    Ok(StageOutput {
        plan,
        target: target.clone(),
        intermediates: vec![("rbal", rbal), ("cfin", cfin)],
    })
}

/// Plans an instance. Grid goals try grid formation, then three-step on
/// [`canonical_grid_target`]; explicit goals try two-step, then three-step.
/// With [`StrategyChoice::Auto`] this never fails; a forced strategy
/// reports why it could not be used.
pub fn plan(instance: &ProblemInstance, opts: &PlanOptions) -> Result<Planned, StrategyFailure> {
    let initial = instance.initial();
    let shuttle = opts.shuttle;
    let mut tried = Vec::new();
    let explicit_target = || match instance.goal() {
        Goal::Arbitrary(t) => t.clone(),
        Goal::Grid => canonical_grid_target(instance.n(), instance.atom_count()),
    };

    let grid_first = matches!(
        (opts.strategy, instance.goal()),
        (StrategyChoice::Auto, Goal::Grid) | (StrategyChoice::Grid, _)
    );
    let two_step_first = matches!(
        (opts.strategy, instance.goal()),
        (StrategyChoice::Auto, Goal::Arbitrary(_)) | (StrategyChoice::TwoStep, _)
    );

    let mut last_failure = None;
    if grid_first {
        tried.push(Strategy::GridFormation);
        match plan_grid_strategy(instance, shuttle) {
            Ok(out) => return Ok(finish(out, tried)),
            Err(e) => last_failure = Some(e),
        }
    } else if two_step_first {
        let target = explicit_target();
        match plan_two_step(initial, &target, shuttle, &mut tried) {
            Ok(out) => return Ok(finish(out, tried)),
            Err(e) => last_failure = Some(e),
        }
    }
    if let (Some(e), false) = (last_failure, opts.strategy == StrategyChoice::Auto) {
        return Err(e);
    }
    tried.push(Strategy::ThreeStep);
    let out = plan_three_step(initial, &explicit_target(), shuttle)?;
    Ok(finish(out, tried))
}

fn finish(out: StageOutput, tried: Vec<Strategy>) -> Planned {
    Planned {
        plan: out.plan,
        target: out.target,
        report: StrategyReport {
            strategy_used: *tried.last().expect("at least one strategy ran"),
            fallbacks_tried: tried,
            intermediates: out.intermediates,
        },
    }
}
