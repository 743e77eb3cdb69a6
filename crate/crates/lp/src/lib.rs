//! LP layer: a dense simplex, max-flow subtour separation, the knapsack
//! orienteering LP and its rounding, and the cancellation LP.

// Errors carry exact rationals for diagnostics and are off the hot path.
#![allow(clippy::result_large_err)]

pub mod ckoclp;
pub mod error;
pub mod kolp;
pub mod lpdump;
pub mod maxflow;
pub mod simplex;

pub use ckoclp::{build_ckoclp, solve_ckoclp, CkocLayout, CkocLpSolution};
pub use error::{LpError, Result};
pub use kolp::{build_kolp, round_kolp, solve_kolp, KoLpPoint, KoLpSolution, OrientLayout};
pub use lpdump::write_lp;
pub use simplex::{simplex_solve, LinearProgram, LpSolution, LpStatus, Objective, Row, RowSense};
