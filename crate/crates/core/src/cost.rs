//! Cost models and per-plan metrics.
//!
//! The simple model charges `t1 + t2` per shift op. The general model
//! admits ops that carry the captured lattice through several relay moves
//! of any length, charging `t2 · T(φ)` for transport, where `T` sums either
//! the move distances (linear) or their square roots (sqrt).

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{BitIter, Geometry, Site};
use crate::ops::{shift_in_place, Plan, PlanError};

/// Time constants in microseconds: `t1` per capture/release cycle, `t2`
/// per unit of transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    t1: f64,
    t2: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cost constants must be positive and finite (t1 = {t1}, t2 = {t2})")]
pub struct CostParamsError {
    pub t1: f64,
    pub t2: f64,
}

impl CostParams {
    pub fn new(t1: f64, t2: f64) -> Result<Self, CostParamsError> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if ok(t1) && ok(t2) {
            Ok(Self { t1, t2 })
        } else {
            Err(CostParamsError { t1, t2 })
        }
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }
}

impl Default for CostParams {
    fn default() -> Self {
        Self { t1: 120.0, t2: 35.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostModel {
    Linear,
    Sqrt,
}

impl std::str::FromStr for CostModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(CostModel::Linear),
            "sqrt" => Ok(CostModel::Sqrt),
            other => Err(format!("unknown cost model {other:?}")),
        }
    }
}

/// `|p| t1 + |p| t2`.
pub fn cost_simple(plan: &Plan, params: CostParams) -> f64 {
    let p = plan.len() as f64;
    p * params.t1 + p * params.t2
}

/// One relay step: the new position of every captured row and column,
/// aligned with the previous (sorted) positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub row_dest: Vec<usize>,
    pub col_dest: Vec<usize>,
}

/// Captures `rows0 × cols0` and carries it through `moves` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralOp {
    pub rows0: Vec<usize>,
    pub cols0: Vec<usize>,
    pub moves: Vec<Move>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("op has no moves")]
    NoMoves,
    #[error("move {}: {axis} destinations have length {found}, expected {expected}", .move_index + 1)]
    Shape {
        move_index: usize,
        axis: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("move {}: {axis} order is not preserved", .move_index + 1)]
    OrderViolation { move_index: usize, axis: &'static str },
    #[error("move {}: {axis} index {} is outside 1..={n}", .move_index + 1, .index + 1)]
    BoundsViolation {
        move_index: usize,
        axis: &'static str,
        index: usize,
        n: usize,
    },
    #[error("move {}: carried atom from {from} lands on the stationary atom at {site}", .move_index + 1)]
    CollisionViolation { move_index: usize, from: Site, site: Site },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("op {}: {error}", .index + 1)]
pub struct GeneralPlanError {
    pub index: usize,
    pub error: ConstraintError,
}

fn increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl GeneralOp {
    /// Position sequences `(I_m, J_m)` for `m = 0..=moves`.
    fn stages(&self) -> impl Iterator<Item = (&[usize], &[usize])> {
        std::iter::once((self.rows0.as_slice(), self.cols0.as_slice()))
            .chain(self.moves.iter().map(|m| (m.row_dest.as_slice(), m.col_dest.as_slice())))
    }

    /// Shape, order and bounds checks, independent of occupancy. Index
    /// `0` names the capture sets; moves are numbered from 1 in messages.
    pub fn check_shape(&self, n: usize) -> Result<(), ConstraintError> {
        if self.moves.is_empty() {
            return Err(ConstraintError::NoMoves);
        }
        let (r0, c0) = (self.rows0.len(), self.cols0.len());
        for (stage, (rows, cols)) in self.stages().enumerate() {
            let move_index = stage.saturating_sub(1);
            for (axis, v, expected) in [("row", rows, r0), ("column", cols, c0)] {
                if v.len() != expected {
                    return Err(ConstraintError::Shape { move_index, axis, expected, found: v.len() });
                }
                if let Some(&index) = v.iter().find(|&&x| x >= n) {
                    return Err(ConstraintError::BoundsViolation { move_index, axis, index, n });
                }
                if !increasing(v) {
                    return Err(ConstraintError::OrderViolation { move_index, axis });
                }
            }
        }
        Ok(())
    }

    /// Displacement length of each move: the largest row shift and the
    /// largest column shift combined as a Euclidean norm. An empty axis
    /// contributes zero.
    pub fn move_distances(&self) -> Vec<f64> {
        let span = |a: &[usize], b: &[usize]| {
            a.iter().zip(b).map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs()).max().unwrap_or(0)
        };
        let stages: Vec<_> = self.stages().collect();
        stages
            .windows(2)
            .map(|w| {
                let dr = span(w[0].0, w[1].0) as f64;
                let dc = span(w[0].1, w[1].1) as f64;
                (dr * dr + dc * dc).sqrt()
            })
            .collect()
    }
}

/// Transport cost `T(φ)` of one op.
pub fn op_cost(gop: &GeneralOp, model: CostModel) -> f64 {
    gop.move_distances()
        .into_iter()
        .map(|d| match model {
            CostModel::Linear => d,
            CostModel::Sqrt => d.sqrt(),
        })
        .sum()
}

/// Checks order preservation and that no carried atom ever stops on a site
/// holding an atom that was not captured.
pub fn validate_general_op(geom: &Geometry, gop: &GeneralOp) -> Result<(), ConstraintError> {
    gop.check_shape(geom.n())?;
    let captured = |i: usize, j: usize| {
        gop.rows0.binary_search(&i).is_ok() && gop.cols0.binary_search(&j).is_ok()
    };
    for (a, &i0) in gop.rows0.iter().enumerate() {
        for (b, &j0) in gop.cols0.iter().enumerate() {
            if !geom.get(i0, j0) {
                continue;
            }
            for (move_index, m) in gop.moves.iter().enumerate() {
                let (i, j) = (m.row_dest[a], m.col_dest[b]);
                if geom.get(i, j) && !captured(i, j) {
                    return Err(ConstraintError::CollisionViolation {
                        move_index,
                        from: Site::new(i0, j0),
                        site: Site::new(i, j),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Validates and executes one op.
pub fn apply_general_op(geom: &Geometry, gop: &GeneralOp) -> Result<Geometry, ConstraintError> {
    validate_general_op(geom, gop)?;
    let last = gop.moves.last().expect("validated");
    let mut out = geom.clone();
    let mut carried = Vec::new();
    for (a, &i0) in gop.rows0.iter().enumerate() {
        for (b, &j0) in gop.cols0.iter().enumerate() {
            if geom.get(i0, j0) {
                out.set(i0, j0, false);
                carried.push((last.row_dest[a], last.col_dest[b]));
            }
        }
    }
    for (i, j) in carried {
        out.set(i, j, true);
    }
    Ok(out)
}

/// Each shift op as a general op with a single unit move.
pub fn lift_simple_to_general(plan: &Plan) -> Vec<GeneralOp> {
    plan.ops()
        .iter()
        .map(|op| {
            let (dr, dc) = op.direction().delta();
            let step = |v: &[usize], d: isize| v.iter().map(|&x| x.wrapping_add_signed(d)).collect();
            GeneralOp {
                rows0: op.rows().to_vec(),
                cols0: op.cols().to_vec(),
                moves: vec![Move {
                    row_dest: step(op.rows(), dr),
                    col_dest: step(op.cols(), dc),
                }],
            }
        })
        .collect()
}

/// `Σ T(φ_k)` over a general plan.
pub fn transport_cost(gops: &[GeneralOp], model: CostModel) -> f64 {
    gops.iter().map(|g| op_cost(g, model)).sum()
}

/// `|p| t1 + Σ T(φ_k) t2`. With `initial` given, every op is validated and
/// executed against the evolving geometry first.
pub fn cost_general(
    gops: &[GeneralOp],
    params: CostParams,
    model: CostModel,
    initial: Option<&Geometry>,
) -> Result<f64, GeneralPlanError> {
    if let Some(geom) = initial {
        run_general(geom, gops)?;
    }
    Ok(gops.len() as f64 * params.t1 + transport_cost(gops, model) * params.t2)
}

/// Executes a general plan, returning the final geometry.
pub fn run_general(initial: &Geometry, gops: &[GeneralOp]) -> Result<Geometry, GeneralPlanError> {
    let mut geom = initial.clone();
    for (index, gop) in gops.iter().enumerate() {
        geom = apply_general_op(&geom, gop).map_err(|error| GeneralPlanError { index, error })?;
    }
    Ok(geom)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PlanMetrics {
    pub op_count: usize,
    /// `Σ T(φ)`; equals `op_count` for shift plans.
    pub total_transport_cost: f64,
    pub estimated_time_us: f64,
    /// Total single-site atom moves across the plan.
    pub atom_moves: usize,
    pub avg_atoms_per_op: f64,
    pub avg_distance_per_atom: f64,
    pub avg_ops_per_atom: f64,
    pub planning_time_us: f64,
}

/// Simulates a shift plan, following each atom by identity. Averages are
/// zero for empty plans or empty geometries; `planning_time_us` is left
/// for the caller.
pub fn plan_metrics(initial: &Geometry, plan: &Plan, params: CostParams) -> Result<PlanMetrics, PlanError> {
    const EMPTY: u32 = u32::MAX;
    let n = initial.n();
    let atoms = initial.atom_count();
    let mut ids = vec![EMPTY; n * n];
    for (k, s) in initial.sites().enumerate() {
        ids[s.row * n + s.col] = k as u32;
    }
    let mut moved_by = vec![0u32; atoms];
    let mut geom = initial.clone();
    let mut total = 0;
    let mut hops = Vec::new();
    for (index, op) in plan.ops().iter().enumerate() {
        let before = geom.clone();
        let moved = shift_in_place(&mut geom, op).map_err(|error| PlanError { index, error })?;
        total += moved;
        if moved == 0 {
            continue;
        }
        let (dr, dc) = op.direction().delta();
        let words = before.words_per_row();
        let mut mask = vec![0u64; words];
        for &j in op.cols() {
            mask[j / 64] |= 1 << (j % 64);
        }
        hops.clear();
        for &i in op.rows() {
            for (w, (&bits, &m)) in before.row(i).iter().zip(&mask).enumerate() {
                for b in BitIter(bits & m) {
                    let j = w * 64 + b;
                    let to = (i.wrapping_add_signed(dr), j.wrapping_add_signed(dc));
                    hops.push((i * n + j, to.0 * n + to.1));
                }
            }
        }
        let carried: Vec<u32> = hops.iter().map(|&(from, _)| std::mem::replace(&mut ids[from], EMPTY)).collect();
        for (&(_, to), id) in hops.iter().zip(carried) {
            ids[to] = id;
            moved_by[id as usize] += 1;
        }
    }
    let per = |x: f64, d: usize| if d == 0 { 0.0 } else { x / d as f64 };
    let ops_total: u64 = moved_by.iter().map(|&c| u64::from(c)).sum();
    Ok(PlanMetrics {
        op_count: plan.len(),
        total_transport_cost: plan.len() as f64,
        estimated_time_us: cost_simple(plan, params),
        atom_moves: total,
        avg_atoms_per_op: per(total as f64, plan.len()),
        avg_distance_per_atom: per(total as f64, atoms),
        avg_ops_per_atom: per(ops_total as f64, atoms),
        planning_time_us: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{Direction, ShiftOp};

    fn g(rows: &[&str]) -> Geometry {
        Geometry::parse_rows(rows).unwrap()
    }

    fn gop(rows0: &[usize], cols0: &[usize], moves: &[(&[usize], &[usize])]) -> GeneralOp {
        GeneralOp {
            rows0: rows0.to_vec(),
            cols0: cols0.to_vec(),
            moves: moves
                .iter()
                .map(|(r, c)| Move { row_dest: r.to_vec(), col_dest: c.to_vec() })
                .collect(),
        }
    }

    #[test]
    fn simple_objective() {
        let p = CostParams::default();
        assert_eq!(cost_simple(&Plan::new(), p), 0.0);
        let op = ShiftOp::new(Direction::Up, vec![1], vec![0]).unwrap();
        let plan: Plan = std::iter::repeat_n(op, 10).collect();
        assert_eq!(cost_simple(&plan, p), 1550.0);
        assert!(CostParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn distances_and_models() {
        let straight = gop(&[0], &[4], &[(&[0], &[0])]);
        assert_eq!(op_cost(&straight, CostModel::Linear), 4.0);
        assert_eq!(op_cost(&straight, CostModel::Sqrt), 2.0);
        let diagonal = gop(&[0], &[0], &[(&[3], &[4])]);
        assert_eq!(op_cost(&diagonal, CostModel::Linear), 5.0);
        assert_eq!(op_cost(&diagonal, CostModel::Sqrt), 5f64.sqrt());
        let unit = gop(&[2], &[2], &[(&[2], &[3])]);
        assert_eq!(op_cost(&unit, CostModel::Linear), 1.0);
        assert_eq!(op_cost(&unit, CostModel::Sqrt), 1.0);
        let relay = gop(&[0], &[0], &[(&[2], &[0]), (&[2], &[2]), (&[3], &[2])]);
        assert_eq!(op_cost(&relay, CostModel::Linear), 5.0);
        assert_eq!(op_cost(&relay, CostModel::Sqrt), 2f64.sqrt() * 2.0 + 1.0);
    }

    #[test]
    fn general_objective() {
        let unit = gop(&[0], &[0], &[(&[1], &[0])]);
        let cost = cost_general(&[unit.clone(), unit], CostParams::default(), CostModel::Linear, None);
        assert_eq!(cost, Ok(310.0));
    }

    #[test]
    fn validation_cases() {
        let a = g(&["0110", "0000", "0000", "0000"]);
        let left = gop(&[0], &[1, 2], &[(&[0], &[0, 1])]);
        assert_eq!(validate_general_op(&a, &left), Ok(()));
        assert_eq!(apply_general_op(&a, &left).unwrap(), g(&["1100", "0000", "0000", "0000"]));

        let crossing = gop(&[0], &[1, 2], &[(&[0], &[3, 2])]);
        assert_eq!(
            validate_general_op(&a, &crossing),
            Err(ConstraintError::OrderViolation { move_index: 0, axis: "column" })
        );

        let b = g(&["1000", "0000", "0010", "0000"]);
        // down two, then right two: the relay stop (2,2) holds an uncaptured atom
        let relay = gop(&[0], &[0], &[(&[2], &[0]), (&[2], &[2]), (&[3], &[2])]);
        assert_eq!(
            validate_general_op(&b, &relay),
            Err(ConstraintError::CollisionViolation {
                move_index: 1,
                from: Site::new(0, 0),
                site: Site::new(2, 2)
            })
        );
        // the same route is fine when the start is empty
        let c = g(&["0000", "0000", "0010", "0000"]);
        assert_eq!(validate_general_op(&c, &relay), Ok(()));

        let off = gop(&[0], &[0], &[(&[4], &[0])]);
        assert!(matches!(validate_general_op(&c, &off), Err(ConstraintError::BoundsViolation { .. })));
        assert_eq!(validate_general_op(&c, &gop(&[0], &[0], &[])), Err(ConstraintError::NoMoves));
    }

    #[test]
    fn lifting_shift_ops() {
        let op = ShiftOp::new(Direction::Left, vec![0, 2], vec![1]).unwrap();
        let lifted = lift_simple_to_general(&Plan::from(vec![op]));
        assert_eq!(lifted, vec![gop(&[0, 2], &[1], &[(&[0, 2], &[0])])]);
        assert!(lift_simple_to_general(&Plan::new()).is_empty());
        // vacuous ops still cost one unit
        let vacuous = ShiftOp::new(Direction::Left, vec![], vec![1, 2]).unwrap();
        let lifted = lift_simple_to_general(&Plan::from(vec![vacuous]));
        assert_eq!(op_cost(&lifted[0], CostModel::Sqrt), 1.0);
    }

    #[test]
    fn metrics_single_op_and_empty() {
        let a = g(&["0110", "0010", "0000", "0000"]);
        let m = plan_metrics(&a, &Plan::new(), CostParams::default()).unwrap();
        assert_eq!(m.avg_atoms_per_op, 0.0);
        assert_eq!(m.avg_ops_per_atom, 0.0);
        let op = ShiftOp::new(Direction::Left, vec![0, 1], vec![1, 2]).unwrap();
        let m = plan_metrics(&a, &Plan::from(vec![op]), CostParams::default()).unwrap();
        assert_eq!(m.op_count, 1);
        assert_eq!(m.atom_moves, 3);
        assert_eq!(m.avg_atoms_per_op, 3.0);
        assert_eq!(m.avg_ops_per_atom, 1.0);
        assert_eq!(m.estimated_time_us, 155.0);
    }

    #[test]
    fn metrics_track_identities() {
        // the atom at (0,2) moves twice, the one at (0,0) never
        let a = g(&["101", "000", "000"]);
        let l = ShiftOp::new(Direction::Left, vec![0], vec![2]).unwrap();
        let d = ShiftOp::new(Direction::Down, vec![0], vec![1]).unwrap();
        let m = plan_metrics(&a, &Plan::from(vec![l, d]), CostParams::default()).unwrap();
        assert_eq!(m.atom_moves, 2);
        assert_eq!(m.avg_ops_per_atom, 1.0);
        assert_eq!(m.avg_atoms_per_op, 1.0);
    }
}
