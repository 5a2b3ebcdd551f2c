//! One-dimensional shuttling: pack every row to the left, then deal the
//! atoms back out to the right into their target columns.
//!
//! Column-wise tasks are solved in the frame of [`Geometry::rotate90`] and
//! mapped back op by op.

use thiserror::Error;

use crate::geometry::{BitIter, Geometry, GeometryError};
use crate::ops::{apply_op, apply_plan, shift_in_place, Direction, MoveError, Plan, ShiftOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Atoms move along rows; per-row counts must match.
    RowWise,
    /// Atoms move along columns; per-column counts must match.
    ColumnWise,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShuttleError {
    #[error(transparent)]
    Dimension(#[from] GeometryError),
    #[error("{axis} {index} holds {initial} atoms initially but {target} in the target")]
    SumMismatch {
        axis: &'static str,
        index: usize,
        initial: usize,
        target: usize,
    },
    #[error("delivery op {index} cannot run: {error}")]
    Delivery { index: usize, error: MoveError },
    #[error("pruned delivery plan does not reproduce the target")]
    PruneVerification,
}

/// A geometry whose rows are packed against column 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedGeometry(Geometry);

impl AlignedGeometry {
    pub fn base(&self) -> &Geometry {
        &self.0
    }

    pub fn into_inner(self) -> Geometry {
        self.0
    }
}

/// Packs each row's atoms into its leftmost columns.
pub fn left_aligned_of(geom: &Geometry) -> AlignedGeometry {
    let sums = geom.row_sums();
    let out = Geometry::from_fn(geom.n(), |i, j| j < sums[i]).expect("side is nonzero");
    AlignedGeometry(out)
}

/// `n − 1` left shifts, sweeping the hole column `x` from right to left;
/// each shift pulls columns `x+1..` of every row with a hole at `x`.
pub fn plan_left_alignment(geom: &Geometry) -> Plan {
    let n = geom.n();
    let mut state = geom.clone();
    let mut plan = Plan::new();
    for x in (0..n.saturating_sub(1)).rev() {
        let rows: Vec<usize> = (0..n).filter(|&i| !state.get(i, x)).collect();
        let op = ShiftOp::from_sorted(Direction::Left, rows, (x + 1..n).collect());
        shift_in_place(&mut state, &op).expect("alignment shifts never collide");
        debug_assert!(state.is_partially_left_aligned(x), "not aligned from column {x}");
        plan.push(op);
    }
    plan
}

/// `n − 1` right shifts, sweeping `x` from left to right; each shift opens
/// a hole at `x` in every row whose target is vacant there. Correct when
/// run on `left_aligned_of(target)`.
pub fn plan_rightward_delivery(target: &Geometry) -> Plan {
    let n = target.n();
    let mut plan = Plan::new();
    let mut state = cfg!(debug_assertions).then(|| left_aligned_of(target).into_inner());
    for x in 0..n.saturating_sub(1) {
        let rows: Vec<usize> = (0..n).filter(|&i| !target.get(i, x)).collect();
        let op = ShiftOp::from_sorted(Direction::Right, rows, (x..n - 1).collect());
        if let Some(state) = state.as_mut() {
            shift_in_place(state, &op).expect("delivery shifts never collide");
            debug_assert!(state.prefix_columns_match(target, x + 1));
        }
        plan.push(op);
    }
    plan
}

/// Columns `j` that are settled in every row: the target either holds an
/// atom there or has no atoms past `j`.
fn settled_columns(target: &Geometry) -> Vec<bool> {
    let n = target.n();
    let words = target.words_per_row();
    let mut unsettled = vec![0u64; words];
    for i in 0..n {
        let row = target.row(i);
        let Some(last) = (0..words).rev().find(|&w| row[w] != 0) else {
            continue;
        };
        let last = last * 64 + 63 - row[last].leading_zeros() as usize;
        for (w, (u, &bits)) in unsettled.iter_mut().zip(row).enumerate() {
            *u |= !bits & crate::geometry::range_word(w, 0, last);
        }
    }
    let mut settled = vec![true; n];
    for (w, &u) in unsettled.iter().enumerate() {
        for b in BitIter(u) {
            settled[w * 64 + b] = false;
        }
    }
    settled
}

/// Removes settled columns from each delivery op and drops ops left with
/// nothing to move. Every edited op is replayed against the unpruned plan
/// in lockstep and kept whole if the edit would change the intermediate
/// geometry, so the result always ends where the input plan ends.
pub fn peephole_prune(plan: &Plan, target: &Geometry) -> Result<Plan, ShuttleError> {
    let settled = settled_columns(target);
    let start = left_aligned_of(target).into_inner();
    let mut state = start.clone();
    let mut out = Plan::new();
    for (index, op) in plan.ops().iter().enumerate() {
        let next = apply_op(&state, op).map_err(|error| ShuttleError::Delivery { index, error })?;
        let cols: Vec<usize> = op.cols().iter().copied().filter(|&j| !settled[j]).collect();
        if op.rows().is_empty() || cols.is_empty() {
            if next != state {
                out.push(op.clone());
            }
        } else {
            let pruned = op.with_cols(cols);
            match apply_op(&state, &pruned) {
                Ok(g) if g == next => out.push(pruned),
                _ => out.push(op.clone()),
            }
        }
        state = next;
    }
    match apply_plan(&start, &out) {
        Ok(g) if &g == target => Ok(out),
        _ => Err(ShuttleError::PruneVerification),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShuttleOptions {
    /// Trim delivery ops with [`peephole_prune`].
    pub peephole: bool,
    /// Drop alignment ops that select no rows.
    pub drop_empty: bool,
}

impl Default for ShuttleOptions {
    fn default() -> Self {
        Self {
            peephole: true,
            drop_empty: false,
        }
    }
}

fn check_sums(axis: &'static str, a: Vec<usize>, b: Vec<usize>) -> Result<(), ShuttleError> {
    match a.iter().zip(&b).position(|(x, y)| x != y) {
        None => Ok(()),
        Some(index) => Err(ShuttleError::SumMismatch {
            axis,
            index,
            initial: a[index],
            target: b[index],
        }),
    }
}

/// Alignment followed by delivery; at most `2(n − 1)` ops.
pub fn solve_1d(
    initial: &Geometry,
    target: &Geometry,
    axis: Axis,
    opts: ShuttleOptions,
) -> Result<Plan, ShuttleError> {
    if initial.n() != target.n() {
        return Err(GeometryError::DimensionMismatch {
            left: initial.n(),
            right: target.n(),
        }
        .into());
    }
    match axis {
        Axis::RowWise => {
            check_sums("row", initial.row_sums(), target.row_sums())?;
            let mut align = plan_left_alignment(initial);
            if opts.drop_empty {
                align = align.without_vacuous();
            }
            let mut deliver = plan_rightward_delivery(target);
            if opts.peephole {
                deliver = peephole_prune(&deliver, target)?;
            }
            Ok(align.then(deliver))
        }
        Axis::ColumnWise => {
            check_sums("column", initial.col_sums(), target.col_sums())?;
            let rotated = solve_1d(&initial.rotate90(), &target.rotate90(), Axis::RowWise, opts)?;
            Ok(rotated.unrotate(initial.n()))
        }
    }
}
