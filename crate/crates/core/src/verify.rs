//! Final-geometry verifiers for the two problem kinds.

use crate::geometry::{Geometry, GeometryError};

/// Side of the largest square buildable from `atoms` atoms, `⌊√N⌋`.
pub fn grid_side(atoms: usize) -> usize {
    atoms.isqrt()
}

/// Exact match against an explicit target.
pub fn verify_arbitrary(final_geom: &Geometry, target: &Geometry) -> Result<bool, GeometryError> {
    if final_geom.n() != target.n() {
        return Err(GeometryError::DimensionMismatch {
            left: final_geom.n(),
            right: target.n(),
        });
    }
    Ok(final_geom == target)
}

/// True iff `final_geom` contains a fully occupied `L × L` block anywhere,
/// with `L = ⌊√atoms⌋`. Scans every anchor against a 2D prefix-sum table.
pub fn verify_grid(final_geom: &Geometry, atoms: usize) -> bool {
    find_grid_anchor(final_geom, atoms).is_some()
}

/// The first (row-major) top-left corner of a full `L × L` block, 0-based.
pub fn find_grid_anchor(final_geom: &Geometry, atoms: usize) -> Option<(usize, usize)> {
    let n = final_geom.n();
    let side = grid_side(atoms);
    if side == 0 {
        return Some((0, 0));
    }
    if side > n {
        return None;
    }
    // prefix[i][j] = atoms in rows < i, cols < j
    let stride = n + 1;
    let mut prefix = vec![0u32; stride * stride];
    for i in 0..n {
        let mut run = 0u32;
        for j in 0..n {
            run += u32::from(final_geom.get(i, j));
            prefix[(i + 1) * stride + j + 1] = prefix[i * stride + j + 1] + run;
        }
    }
    let need = (side * side) as u32;
    for i0 in 0..=n - side {
        for j0 in 0..=n - side {
            let (i1, j1) = (i0 + side, j0 + side);
            let sum = prefix[i1 * stride + j1] + prefix[i0 * stride + j0]
                - prefix[i0 * stride + j1]
                - prefix[i1 * stride + j0];
            if sum == need {
                return Some((i0, j0));
            }
        }
    }
    None
}
