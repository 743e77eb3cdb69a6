//! Deterministic routing subproblems: orienteering with knapsack and
//! knapsack-deadline constraints, exact and approximate.

// Errors carry exact rationals for diagnostics and are off the hot path.
#![allow(clippy::result_large_err)]

pub mod bucketing;
pub mod check;
mod dp;
pub mod error;
pub mod exact;
pub mod format;
pub mod generate;
pub mod instance;
pub mod lagrangian;
pub mod portals;

pub use bucketing::{orientkd_bucketing, BucketRun};
pub use check::{check_knap_orient, check_knapokd, check_orientkd, check_route, Violation};
pub use dp::EXACT_CAP;
pub use error::{DetError, Result};
pub use exact::{knap_orient_exact, knapokd_exact, orienteering_exact, orientkd_exact};
pub use format::{parse_det_instance, write_det_instance, DetInstance};
pub use instance::{KnapOkdInstance, KnapOrientInstance, OrientKdInstance, Path, Solution, Terminals};
pub use lagrangian::{
    lagrangian_knap_reduce, reduce_with_guess, ExactKnapOrient, ExactOrienteering, KnapOrientSolver, Lagrangian,
    OrienteeringSolver,
};
pub use portals::{
    extract_okd_portals, orientkd_portal_alg, orientkd_portal_enumerate, verify_okd_portals, OkdPortalStructure,
    PortalRun,
};
