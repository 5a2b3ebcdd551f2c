//! Reconfiguration planning for atom arrays moved by row/column lattice
//! shifts.
//!
//! A plan is a sequence of [`ShiftOp`]s, each moving every atom in a
//! row-set × column-set selection one site in a common direction. The
//! planners here need at most `6(n − 1)` such ops on an `n × n` lattice,
//! i.e. `O(√N)` for `N` atoms.
//!
//! Indices are 0-based throughout the API; the JSON formats in [`format`]
//! and `Display` output are 1-based.

pub mod cost;
pub mod decompose;
pub mod format;
pub mod gale_ryser;
pub mod geometry;
pub mod instance;
pub mod ops;
pub mod rng;
pub mod shuttle;
pub mod verify;

pub use cost::{CostModel, CostParams, GeneralOp, Move, PlanMetrics};
pub use decompose::{plan, PlanOptions, Planned, Strategy, StrategyReport};
pub use gale_ryser::{construct_geometry, gale_ryser_check, DegreeSpec};
pub use geometry::{Geometry, GeometryError, Site};
pub use instance::{generate_instance, Goal, ProblemInstance, ProblemKind};
pub use ops::{apply_op, apply_plan, Direction, MoveError, Plan, PlanError, ShiftOp};
pub use shuttle::{solve_1d, Axis, ShuttleOptions};
pub use verify::{grid_side, verify_arbitrary, verify_grid};
