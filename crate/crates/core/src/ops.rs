//! Row/column lattice shift operations and plans.

use std::fmt;

use thiserror::Error;

use crate::geometry::{Geometry, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

impl Direction {
    pub fn letter(self) -> char {
        match self {
            Direction::Left => 'L',
            Direction::Right => 'R',
            Direction::Up => 'U',
            Direction::Down => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'L' => Some(Direction::Left),
            'R' => Some(Direction::Right),
            'U' => Some(Direction::Up),
            'D' => Some(Direction::Down),
            _ => None,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    /// Whether the op moves atoms along a row (changes the column index).
    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::Left | Direction::Right)
    }

    /// `(drow, dcol)` displacement of one application.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
        }
    }

    /// The direction that `self`, expressed in the frame of
    /// [`Geometry::rotate90`], corresponds to in the unrotated frame.
    pub fn unrotate(self) -> Self {
        match self {
            Direction::Left => Direction::Up,
            Direction::Right => Direction::Down,
            Direction::Up => Direction::Right,
            Direction::Down => Direction::Left,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("{axis} indices must be strictly increasing")]
    NotIncreasing { axis: &'static str },
}

/// One tweezer operation `(I, J, δ)`: every atom in `rows × cols` moves one
/// site in `direction`. Indices are 0-based and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftOp {
    direction: Direction,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl ShiftOp {
    pub fn new(direction: Direction, rows: Vec<usize>, cols: Vec<usize>) -> Result<Self, OpError> {
        if !strictly_increasing(&rows) {
            return Err(OpError::NotIncreasing { axis: "row" });
        }
        if !strictly_increasing(&cols) {
            return Err(OpError::NotIncreasing { axis: "column" });
        }
        Ok(Self {
            direction,
            rows,
            cols,
        })
    }

    /// Builds from index sets that are increasing by construction.
    pub(crate) fn from_sorted(direction: Direction, rows: Vec<usize>, cols: Vec<usize>) -> Self {
        debug_assert!(strictly_increasing(&rows) && strictly_increasing(&cols));
        Self {
            direction,
            rows,
            cols,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// An op with an empty row or column set selects no sites.
    pub fn is_vacuous(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    /// Maps an op written in the rotated frame of [`Geometry::rotate90`] back
    /// to the original frame, so that
    /// `rotate90(apply(g, unrotate(op))) == apply(rotate90(g), op)`.
    pub fn unrotate(&self, n: usize) -> ShiftOp {
        // rotated row i' is original column n-1-i'; rotated column j' is original row j'
        let cols = self.rows.iter().rev().map(|&r| n - 1 - r).collect();
        ShiftOp::from_sorted(self.direction.unrotate(), self.cols.clone(), cols)
    }

    pub(crate) fn with_cols(&self, cols: Vec<usize>) -> ShiftOp {
        ShiftOp::from_sorted(self.direction, self.rows.clone(), cols)
    }
}

impl fmt::Display for ShiftOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "{}(I={{{}}}, J={{{}}})",
            self.direction.letter(),
            one(&self.rows),
            one(&self.cols)
        )
    }
}

fn strictly_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("index {index} is outside the {n}x{n} lattice")]
    OutOfRange { index: usize, n: usize },
    #[error("atom at {site} would leave the lattice")]
    Boundary { site: Site },
    #[error("two atoms would occupy {site}")]
    Collision { site: Site },
}

/// A [`MoveError`] tagged with the 0-based index of the failing op.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("op {} failed: {error}", .index + 1)]
pub struct PlanError {
    pub index: usize,
    pub error: MoveError,
}

/// Ordered sequence of shift operations; `ops[0]` runs first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    ops: Vec<ShiftOp>,
}

impl Plan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[ShiftOp] {
        &self.ops
    }

    pub fn push(&mut self, op: ShiftOp) {
        self.ops.push(op);
    }

    /// `next ∘ self`: runs `self` first, then `next`.
    pub fn then(mut self, next: Plan) -> Plan {
        self.ops.extend(next.ops);
        self
    }

    pub fn into_ops(self) -> Vec<ShiftOp> {
        self.ops
    }

    /// Drops ops that select no sites.
    pub fn without_vacuous(self) -> Plan {
        self.ops.into_iter().filter(|op| !op.is_vacuous()).collect()
    }

    /// Maps every op out of the rotated frame; see [`ShiftOp::unrotate`].
    pub fn unrotate(&self, n: usize) -> Plan {
        self.ops.iter().map(|op| op.unrotate(n)).collect()
    }
}

impl FromIterator<ShiftOp> for Plan {
    fn from_iter<T: IntoIterator<Item = ShiftOp>>(iter: T) -> Self {
        Self {
            ops: iter.into_iter().collect(),
        }
    }
}

impl From<Vec<ShiftOp>> for Plan {
    fn from(ops: Vec<ShiftOp>) -> Self {
        Self { ops }
    }
}

/// Applies one op, returning the new geometry.
pub fn apply_op(geom: &Geometry, op: &ShiftOp) -> Result<Geometry, MoveError> {
    let mut out = geom.clone();
    shift_in_place(&mut out, op)?;
    Ok(out)
}

/// Left fold of [`apply_op`] over the plan.
pub fn apply_plan(geom: &Geometry, plan: &Plan) -> Result<Geometry, PlanError> {
    let mut out = geom.clone();
    for (index, op) in plan.ops().iter().enumerate() {
        shift_in_place(&mut out, op).map_err(|error| PlanError { index, error })?;
    }
    Ok(out)
}

/// Applies `op` in place and returns how many atoms moved. On error the
/// geometry is left in an unspecified state.
pub(crate) fn shift_in_place(geom: &mut Geometry, op: &ShiftOp) -> Result<usize, MoveError> {
    let n = geom.n();
    for &index in op.rows.iter().chain(&op.cols) {
        if index >= n {
            return Err(MoveError::OutOfRange { index, n });
        }
    }
    if op.is_vacuous() {
        return Ok(0);
    }
    let words = geom.words_per_row();
    let mut mask = vec![0u64; words];
    for &j in &op.cols {
        mask[j / 64] |= 1 << (j % 64);
    }
    // boundary faults take precedence over collisions
    let edge = |v: &[usize], at: usize| v.binary_search(&at).is_ok();
    let stuck = match op.direction {
        Direction::Left if edge(&op.cols, 0) => op.rows.iter().find(|&&i| geom.get(i, 0)).map(|&i| Site::new(i, 0)),
        Direction::Right if edge(&op.cols, n - 1) => {
            op.rows.iter().find(|&&i| geom.get(i, n - 1)).map(|&i| Site::new(i, n - 1))
        }
        Direction::Up if edge(&op.rows, 0) => op.cols.iter().find(|&&j| geom.get(0, j)).map(|&j| Site::new(0, j)),
        Direction::Down if edge(&op.rows, n - 1) => {
            op.cols.iter().find(|&&j| geom.get(n - 1, j)).map(|&j| Site::new(n - 1, j))
        }
        _ => None,
    };
    if let Some(site) = stuck {
        return Err(MoveError::Boundary { site });
    }
    match op.direction {
        Direction::Left | Direction::Right => shift_horizontal(geom, op, &mask),
        Direction::Up | Direction::Down => shift_vertical(geom, op, &mask),
    }
}

fn shift_horizontal(geom: &mut Geometry, op: &ShiftOp, mask: &[u64]) -> Result<usize, MoveError> {
    let words = mask.len();
    let left = op.direction == Direction::Left;
    let mut moving = vec![0u64; words];
    let mut moved_total = 0;
    for &i in &op.rows {
        let row = geom.row_mut(i);
        let mut any = 0;
        for w in 0..words {
            moving[w] = row[w] & mask[w];
            any |= moving[w];
        }
        if any == 0 {
            continue;
        }
        for w in 0..words {
            row[w] &= !mask[w];
        }
        for w in 0..words {
            let shifted = if left {
                let carry = if w + 1 < words { moving[w + 1] << 63 } else { 0 };
                (moving[w] >> 1) | carry
            } else {
                let carry = if w > 0 { moving[w - 1] >> 63 } else { 0 };
                (moving[w] << 1) | carry
            };
            let clash = row[w] & shifted;
            if clash != 0 {
                return Err(MoveError::Collision {
                    site: Site::new(i, w * 64 + clash.trailing_zeros() as usize),
                });
            }
            row[w] |= shifted;
            moved_total += shifted.count_ones() as usize;
        }
    }
    Ok(moved_total)
}

fn shift_vertical(geom: &mut Geometry, op: &ShiftOp, mask: &[u64]) -> Result<usize, MoveError> {
    let n = geom.n();
    let words = mask.len();
    let up = op.direction == Direction::Up;
    // lift every selected atom out first so that vacated sites can be re-filled
    let mut lifted: Vec<(usize, Vec<u64>)> = Vec::with_capacity(op.rows.len());
    for &i in &op.rows {
        let row = geom.row_mut(i);
        let moving: Vec<u64> = (0..words).map(|w| row[w] & mask[w]).collect();
        if moving.iter().all(|&w| w == 0) {
            continue;
        }
        for w in 0..words {
            row[w] &= !mask[w];
        }
        lifted.push((i, moving));
    }
    let mut moved_total = 0;
    for (i, moving) in lifted {
        let dest = if up { i.checked_sub(1) } else { Some(i + 1).filter(|&d| d < n) };
        let Some(dest) = dest else {
            let w = moving.iter().position(|&w| w != 0).unwrap_or(0);
            return Err(MoveError::Boundary {
                site: Site::new(i, w * 64 + moving[w].trailing_zeros() as usize),
            });
        };
        let row = geom.row_mut(dest);
        for w in 0..words {
            let clash = row[w] & moving[w];
            if clash != 0 {
                return Err(MoveError::Collision {
                    site: Site::new(dest, w * 64 + clash.trailing_zeros() as usize),
                });
            }
            row[w] |= moving[w];
            moved_total += moving[w].count_ones() as usize;
        }
    }
    Ok(moved_total)
}
