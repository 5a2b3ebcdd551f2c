//! Independent reference implementations on plain `Vec<Vec<bool>>` grids.
#![allow(dead_code)]

use atomshuttle::cost::GeneralOp;
use atomshuttle::rng::InstanceRng;
use atomshuttle::{Direction, Geometry, Plan, ShiftOp};

pub type Grid = Vec<Vec<bool>>;

pub fn to_grid(g: &Geometry) -> Grid {
    (0..g.n()).map(|i| (0..g.n()).map(|j| g.get(i, j)).collect()).collect()
}

pub fn from_grid(grid: &Grid) -> Geometry {
    Geometry::from_fn(grid.len(), |i, j| grid[i][j]).unwrap()
}

pub fn random_geometry(rng: &mut InstanceRng, n: usize, alpha: f64) -> Geometry {
    Geometry::from_fn(n, |_, _| rng.unit() < alpha).unwrap()
}

#[derive(Debug, PartialEq, Eq)]
pub enum Fault {
    Boundary,
    Collision,
}

/// Cell-by-cell single op.
pub fn brute_apply(grid: &Grid, op: &ShiftOp) -> Result<Grid, Fault> {
    let n = grid.len() as isize;
    let (dr, dc) = match op.direction() {
        Direction::Left => (0, -1),
        Direction::Right => (0, 1),
        Direction::Up => (-1, 0),
        Direction::Down => (1, 0),
    };
    let mut out = grid.clone();
    let mut dests = Vec::new();
    for &i in op.rows() {
        for &j in op.cols() {
            if grid[i][j] {
                let (ni, nj) = (i as isize + dr, j as isize + dc);
                if ni < 0 || nj < 0 || ni >= n || nj >= n {
                    return Err(Fault::Boundary);
                }
                out[i][j] = false;
                dests.push((ni as usize, nj as usize));
            }
        }
    }
    for (i, j) in dests {
        if out[i][j] {
            return Err(Fault::Collision);
        }
        out[i][j] = true;
    }
    Ok(out)
}

pub fn brute_replay(grid: &Grid, plan: &Plan) -> Result<Grid, (usize, Fault)> {
    let mut g = grid.clone();
    for (k, op) in plan.ops().iter().enumerate() {
        g = brute_apply(&g, op).map_err(|f| (k, f))?;
    }
    Ok(g)
}

/// Packs each row's atoms to the left.
pub fn pack_rows(grid: &Grid) -> Grid {
    grid.iter()
        .map(|row| {
            let k = row.iter().filter(|&&b| b).count();
            (0..row.len()).map(|j| j < k).collect()
        })
        .collect()
}

/// Whether some `L × L` block is fully occupied, by scanning every anchor.
pub fn naive_has_block(grid: &Grid, side: usize) -> bool {
    let n = grid.len();
    if side == 0 {
        return true;
    }
    if side > n {
        return false;
    }
    (0..=n - side).any(|i0| {
        (0..=n - side).any(|j0| (i0..i0 + side).all(|i| (j0..j0 + side).all(|j| grid[i][j])))
    })
}

pub fn isqrt(x: usize) -> usize {
    let mut r = 0;
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Moves atoms stop by stop and reports whether the op is legal: every
/// stop keeps rows and columns in strictly increasing order inside the
/// lattice, and no carried atom ever shares a stop with an atom that
/// stayed behind.
pub fn brute_general_accepts(grid: &Grid, gop: &GeneralOp) -> bool {
    let n = grid.len();
    if gop.moves.is_empty() {
        return false;
    }
    let mut stages = vec![(gop.rows0.clone(), gop.cols0.clone())];
    stages.extend(gop.moves.iter().map(|m| (m.row_dest.clone(), m.col_dest.clone())));
    for (rows, cols) in &stages {
        if rows.len() != gop.rows0.len() || cols.len() != gop.cols0.len() {
            return false;
        }
        for v in [rows, cols] {
            if v.iter().any(|&x| x >= n) || v.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
    }
    let mut carried = Vec::new();
    let mut stationary = std::collections::HashSet::new();
    for i in 0..n {
        for j in 0..n {
            if !grid[i][j] {
                continue;
            }
            match (gop.rows0.iter().position(|&r| r == i), gop.cols0.iter().position(|&c| c == j)) {
                (Some(a), Some(b)) => carried.push((a, b)),
                _ => {
                    stationary.insert((i, j));
                }
            }
        }
    }
    for (rows, cols) in &stages[1..] {
        for &(a, b) in &carried {
            if stationary.contains(&(rows[a], cols[b])) {
                return false;
            }
        }
    }
    true
}

/// Executes an op the oracle accepted.
pub fn brute_general_execute(grid: &Grid, gop: &GeneralOp) -> Grid {
    let n = grid.len();
    let last = gop.moves.last().unwrap();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if !grid[i][j] {
                continue;
            }
            let a = gop.rows0.iter().position(|&r| r == i);
            let b = gop.cols0.iter().position(|&c| c == j);
            let (ti, tj) = match (a, b) {
                (Some(a), Some(b)) => (last.row_dest[a], last.col_dest[b]),
                _ => (i, j),
            };
            assert!(!out[ti][tj], "two atoms at ({ti},{tj})");
            out[ti][tj] = true;
        }
    }
    out
}
