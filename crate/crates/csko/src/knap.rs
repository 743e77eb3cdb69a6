//! Choice of knapsack-orienteering solver for the reductions.

use corrko_core::rational::{int, Rational};
use corrko_detsolve::{knap_orient_exact, ExactOrienteering, KnapOrientInstance, Solution};
use corrko_lp::{round_kolp, solve_kolp};

use crate::error::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum KnapSolver {
    /// Solve the KO-LP and round it; the path earns at least a fifth of the
    /// LP value.
    #[default]
    Lp,
    /// Exact dynamic program.
    Exact,
}

impl KnapSolver {
    /// Approximation factor guaranteed against the integer optimum.
    pub fn alpha(self) -> Rational {
        match self {
            Self::Lp => int(5),
            Self::Exact => int(1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KnapRun {
    /// KO-LP optimum, when the LP was solved.
    pub lp_value: Option<f64>,
    pub solution: Solution,
}

pub fn solve_knap(inst: &KnapOrientInstance, solver: KnapSolver) -> Result<KnapRun> {
    Ok(match solver {
        KnapSolver::Exact => KnapRun {
            lp_value: None,
            solution: knap_orient_exact(inst)?,
        },
        KnapSolver::Lp => {
            let sol = solve_kolp(inst)?;
            let solution = round_kolp(inst, &sol, &ExactOrienteering)?;
            KnapRun {
                lp_value: Some(sol.objective),
                solution,
            }
        }
    })
}
