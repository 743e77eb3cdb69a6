//! Weighted Bernoulli sizes: each vertex has size `s` with reward `R` with
//! probability `p`, and size 0 with no reward otherwise. The rarely-large
//! part then reduces to plain knapsack orienteering.

use corrko_core::rational::consts;
use corrko_core::rational::{int, Rational};
use corrko_core::CorrKOInstance;
use corrko_detsolve::{KnapOkdInstance, KnapOrientInstance};
use num::traits::Zero;

use crate::decompose::{decompose_difficult, mix_parts, solve_heavy, solve_small, DecomposedRun, PartRun, SubInstance};
use crate::error::{CskoError, Result};
use crate::knap::{solve_knap, KnapSolver};
use crate::randomized::RandomizedPolicy;
use crate::twopoint::tcsko_to_okd;

pub fn check_bernoulli(inst: &CorrKOInstance) -> Result<()> {
    for v in inst.non_root() {
        let atoms = inst.dist(v).atoms();
        let ok = match atoms {
            [_] => true,
            [a, b] => (a.size.is_zero() && a.reward.is_zero()) || (b.size.is_zero() && b.reward.is_zero()),
            _ => false,
        };
        if !ok {
            return Err(CskoError::NotCanonical(format!("vertex {v} is not weighted Bernoulli")));
        }
    }
    Ok(())
}

/// Whether every deadline of the knapsack-deadline instance is at least the
/// total weight, so that no rooted path can miss one.
pub fn deadlines_vacuous(j: &KnapOkdInstance) -> bool {
    let total: Rational = j.okd.weights.iter().sum();
    j.okd.deadlines.iter().all(|d| *d >= total)
}

/// The plain knapsack orienteering instance behind a vacuous-deadline one.
pub fn knap_orient_of(j: &KnapOkdInstance) -> Result<KnapOrientInstance> {
    Ok(KnapOrientInstance::new(
        j.okd.metric.clone(),
        j.okd.terminals,
        j.okd.length_budget,
        j.okd.rewards.clone(),
        j.extra_weights.clone(),
        Some(j.extra_budget.clone()),
    )?)
}

/// `4α / (1 - e^{-1/2})`, with the denominator rounded down.
pub fn rare_large_beta(solver: KnapSolver) -> Rational {
    int(4) * solver.alpha() / (Rational::from_integer(1.into()) - consts::inv_sqrt_e_upper())
}

#[derive(Debug, Clone)]
pub struct BernoulliRun {
    pub run: DecomposedRun,
    pub okd: Option<KnapOkdInstance>,
}

fn solve_rare_large(sub: &SubInstance, solver: KnapSolver) -> Result<(PartRun, Option<KnapOkdInstance>)> {
    let beta = rare_large_beta(solver);
    if sub.is_trivial() {
        let policy = RandomizedPolicy::root_only(&sub.inst);
        return Ok((
            PartRun {
                policy: policy.map_vertices(&sub.ids),
                beta,
                value: Rational::zero(),
            },
            None,
        ));
    }
    let j = tcsko_to_okd(&sub.inst)?;
    if !deadlines_vacuous(&j) {
        return Err(CskoError::NotCanonical("knapsack deadlines are binding".into()));
    }
    let knap = solve_knap(&knap_orient_of(&j)?, solver)?;
    let policy = RandomizedPolicy::Fixed(corrko_core::NonAdaptivePolicy::new(knap.solution.path));
    let value = policy.exact_value(&sub.inst)?;
    Ok((
        PartRun {
            policy: policy.map_vertices(&sub.ids),
            beta,
            value,
        },
        Some(j),
    ))
}

/// Mixes the small-part, rarely-large and heavy solvers. The end-to-end
/// factor `run.factor` is `16α + 4α/(1 - e^{-1/2}) + 4`.
pub fn bernoulli_csko(inst: &CorrKOInstance, solver: KnapSolver) -> Result<BernoulliRun> {
    check_bernoulli(inst)?;
    let parts = decompose_difficult(inst);
    let small = solve_small(&parts.small, solver)?.part;
    let (rare, okd) = solve_rare_large(&parts.rare_large, solver)?;
    let heavy = solve_heavy(&parts.heavy)?;
    Ok(BernoulliRun {
        run: mix_parts(inst, small, rare, heavy)?,
        okd,
    })
}
