//! Approximation algorithms for correlated knapsack orienteering: the
//! `O(log W)` level algorithm, the structural LP for the `O(log log W)`
//! bound, the Bernoulli and two-point special cases, and cancellation.

// Errors carry exact rationals for diagnostics and are off the hot path.
#![allow(clippy::result_large_err)]

pub mod bernoulli;
pub mod cancel;
pub mod configlp;
pub mod decompose;
pub mod error;
pub mod knap;
pub mod params;
pub mod polylogw;
pub mod randomized;
pub mod round;
pub mod structure;
pub mod twopoint;

pub use error::{CskoError, Result};
pub use knap::{solve_knap, KnapRun, KnapSolver};
pub use params::StructuralParams;
pub use polylogw::{level_instance, poly_logw, tree_kolp_point, PolyMode, PolyOptions, PolyRun, TreeLpPoint};
pub use randomized::{thinned_start_prob, RandomizedPolicy};
pub use structure::{extract_structure, verify_structure, PortalPair, PortalStructure, StructureChecks};
pub use configlp::{solve_config_lp, ConfigLpSolution};
pub use decompose::{decompose_difficult, Decomposition};
pub use round::{csko_round, RoundOutcome};
pub use bernoulli::{bernoulli_csko, BernoulliRun};
pub use twopoint::{expreward_formula, okd_to_tcsko, solve_two_point, tcsko_to_okd, TwoPointRun};
pub use cancel::{brute_force_cancellation, cancel_branch, cancel_pipeline, search_thresholds, CancelBranch, CancelRun};
