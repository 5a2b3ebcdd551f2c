//! Problem instances and their seeded generation.

use thiserror::Error;

use crate::geometry::{Geometry, GeometryError};
use crate::rng::InstanceRng;
use crate::verify::{grid_side, verify_arbitrary, verify_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Arbitrary,
    Grid,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Arbitrary => "arbitrary",
            ProblemKind::Grid => "grid",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arbitrary" => Ok(ProblemKind::Arbitrary),
            "grid" => Ok(ProblemKind::Grid),
            other => Err(InstanceError::UnknownKind(other.to_string())),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    /// Reproduce this geometry exactly.
    Arbitrary(Geometry),
    /// Contain a full `⌊√N⌋ × ⌊√N⌋` block anywhere.
    Grid,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("fill probability {0} is outside [0, 1]")]
    Alpha(f64),
    #[error("unknown problem kind {0:?}")]
    UnknownKind(String),
    #[error("target holds {target} atoms but the initial geometry holds {initial}")]
    AtomCountMismatch { initial: usize, target: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    initial: Geometry,
    goal: Goal,
    alpha: f64,
    seed: u64,
}

impl ProblemInstance {
    pub fn new(initial: Geometry, goal: Goal, alpha: f64, seed: u64) -> Result<Self, InstanceError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(InstanceError::Alpha(alpha));
        }
        if let Goal::Arbitrary(target) = &goal {
            if target.n() != initial.n() {
                return Err(GeometryError::DimensionMismatch {
                    left: initial.n(),
                    right: target.n(),
                }
                .into());
            }
            if target.atom_count() != initial.atom_count() {
                return Err(InstanceError::AtomCountMismatch {
                    initial: initial.atom_count(),
                    target: target.atom_count(),
                });
            }
        }
        Ok(Self {
            initial,
            goal,
            alpha,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    pub fn initial(&self) -> &Geometry {
        &self.initial
    }

    pub fn goal(&self) -> &Goal {
        &self.goal
    }

    pub fn target(&self) -> Option<&Geometry> {
        match &self.goal {
            Goal::Arbitrary(t) => Some(t),
            Goal::Grid => None,
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self.goal {
            Goal::Arbitrary(_) => ProblemKind::Arbitrary,
            Goal::Grid => ProblemKind::Grid,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn atom_count(&self) -> usize {
        self.initial.atom_count()
    }

    /// `L = ⌊√N⌋`; meaningful for grid instances.
    pub fn grid_side(&self) -> usize {
        grid_side(self.atom_count())
    }

    /// Runs this instance's verifier on a final geometry.
    pub fn accepts(&self, final_geom: &Geometry) -> bool {
        match &self.goal {
            Goal::Arbitrary(target) => verify_arbitrary(final_geom, target).unwrap_or(false),
            Goal::Grid => verify_grid(final_geom, self.atom_count()),
        }
    }
}

/// Samples an instance: each site of the initial geometry is occupied with
/// probability `alpha` (one draw per site, row-major). Arbitrary targets
/// place the same number of atoms uniformly at random via a partial
/// Fisher–Yates shuffle of the row-major site indices, continuing the same
/// stream. See [`crate::rng`] for the exact sampling formulas.
pub fn generate_instance(
    n: usize,
    alpha: f64,
    seed: u64,
    kind: ProblemKind,
) -> Result<ProblemInstance, InstanceError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(InstanceError::Alpha(alpha));
    }
    let mut rng = InstanceRng::new(seed);
    let mut initial = Geometry::empty(n)?;
    for i in 0..n {
        for j in 0..n {
            if rng.unit() < alpha {
                initial.set(i, j, true);
            }
        }
    }
    let goal = match kind {
        ProblemKind::Grid => Goal::Grid,
        ProblemKind::Arbitrary => {
            let atoms = initial.atom_count();
            let mut sites: Vec<usize> = (0..n * n).collect();
            for k in 0..atoms {
                let r = k + rng.below((n * n - k) as u64) as usize;
                sites.swap(k, r);
            }
            let mut target = Geometry::empty(n)?;
            for &s in &sites[..atoms] {
                target.set(s / n, s % n, true);
            }
            Goal::Arbitrary(target)
        }
    };
    ProblemInstance::new(initial, goal, alpha, seed)
}
