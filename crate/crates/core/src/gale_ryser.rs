//! Existence test and greedy construction for binary matrices with
//! prescribed row and column sums.

use std::cmp::Reverse;

use thiserror::Error;

use crate::geometry::Geometry;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegreeError {
    #[error("{axis} sums have length {found}, expected {n}")]
    Length { axis: &'static str, n: usize, found: usize },
    #[error("{axis} sum {value} at index {index} exceeds side {n}")]
    Range { axis: &'static str, index: usize, value: usize, n: usize },
    #[error("degree sequences must be nonempty")]
    Empty,
    #[error("no binary matrix realizes these row and column sums")]
    Infeasible,
}

/// Row sums `R` and column sums `C` of an `n × n` binary matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSpec {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl DegreeSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self, DegreeError> {
        let n = rows.len();
        if n == 0 {
            return Err(DegreeError::Empty);
        }
        if cols.len() != n {
            return Err(DegreeError::Length { axis: "column", n, found: cols.len() });
        }
        for (axis, v) in [("row", &rows), ("column", &cols)] {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, &x)| x > n) {
                return Err(DegreeError::Range { axis, index, value, n });
            }
        }
        Ok(Self { n, rows, cols })
    }

    pub fn of(geom: &Geometry) -> Self {
        Self {
            n: geom.n(),
            rows: geom.row_sums(),
            cols: geom.col_sums(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }
}

/// Gale–Ryser: with `C'` the column sums sorted non-increasing, a matrix
/// exists iff `ΣR = ΣC` and `Σ_{j≤k} c'_j ≤ Σ_i min(r_i, k)` for every `k`.
pub fn gale_ryser_check(spec: &DegreeSpec) -> bool {
    let n = spec.n;
    if spec.rows.iter().sum::<usize>() != spec.cols.iter().sum::<usize>() {
        return false;
    }
    let mut sorted = spec.cols.clone();
    sorted.sort_unstable_by_key(|&c| Reverse(c));

    // Σ_i min(r_i, k) = Σ_{v<k} v·cnt[v] + k·#{r_i ≥ k}
    let mut cnt = vec![0usize; n + 1];
    for &r in &spec.rows {
        cnt[r] += 1;
    }
    let mut below = 0; // Σ_{v<k} v·cnt[v]
    let mut at_least = n; // #{r_i ≥ k}
    let mut lhs = 0;
    for k in 1..=n {
        below += (k - 1) * cnt[k - 1];
        at_least -= cnt[k - 1];
        lhs += sorted[k - 1];
        if lhs > below + k * at_least {
            return false;
        }
    }
    true
}

/// Builds a realization column by column, giving each column's atoms to
/// the rows with the most remaining demand. Ties go to the lower row index.
pub fn construct_geometry(spec: &DegreeSpec) -> Result<Geometry, DegreeError> {
    if !gale_ryser_check(spec) {
        return Err(DegreeError::Infeasible);
    }
    let n = spec.n;
    let mut out = Geometry::empty(n).expect("spec side is nonzero");
    let mut remaining = spec.rows.clone();
    let mut order: Vec<usize> = (0..n).collect();
    for (j, &c) in spec.cols.iter().enumerate() {
        if c == 0 {
            continue;
        }
        // a partial selection would do, but the full sort keeps this obvious
        order.sort_unstable_by_key(|&i| (Reverse(remaining[i]), i));
        for &i in &order[..c] {
            debug_assert!(remaining[i] > 0, "feasible spec ran out of row demand");
            remaining[i] -= 1;
            out.set(i, j, true);
        }
    }
    debug_assert!(remaining.iter().all(|&r| r == 0));
    Ok(out)
}
