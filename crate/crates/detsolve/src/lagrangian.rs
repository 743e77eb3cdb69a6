//! Knapsack constraints via Lagrangian reweighting of a base orienteering
//! solver.

use corrko_core::rational::{int, ratio};
use corrko_core::Rational;
use num::traits::{One, Signed, Zero};
use num::BigInt;

use crate::check::{check_knap_orient, check_route};
use crate::error::{DetError, Result};
use crate::exact::{knap_orient_exact, orienteering_exact};
use crate::instance::{KnapOrientInstance, Path, Solution};

/// An approximation algorithm for plain (rooted or P2P) orienteering. The
/// knapsack fields of the instance it receives are ignored.
pub trait OrienteeringSolver {
    fn alpha(&self) -> Rational;
    fn solve(&self, inst: &KnapOrientInstance) -> Result<Solution>;
}

/// An approximation algorithm for knapsack orienteering.
pub trait KnapOrientSolver {
    fn alpha(&self) -> Rational;
    fn solve(&self, inst: &KnapOrientInstance) -> Result<Solution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOrienteering;

impl OrienteeringSolver for ExactOrienteering {
    fn alpha(&self) -> Rational {
        Rational::one()
    }
    fn solve(&self, inst: &KnapOrientInstance) -> Result<Solution> {
        orienteering_exact(inst)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactKnapOrient;

impl KnapOrientSolver for ExactKnapOrient {
    fn alpha(&self) -> Rational {
        Rational::one()
    }
    fn solve(&self, inst: &KnapOrientInstance) -> Result<Solution> {
        knap_orient_exact(inst)
    }
}

/// The reduction as a knapsack-orienteering solver of factor
/// `(alpha + 2)(1 + eps)`.
#[derive(Debug, Clone)]
pub struct Lagrangian<S> {
    pub base: S,
    pub eps: Rational,
}

impl<S: OrienteeringSolver> KnapOrientSolver for Lagrangian<S> {
    fn alpha(&self) -> Rational {
        (self.base.alpha() + int(2)) * (Rational::one() + &self.eps)
    }
    fn solve(&self, inst: &KnapOrientInstance) -> Result<Solution> {
        lagrangian_knap_reduce(&self.base, inst, &self.eps)
    }
}

const GRID_DENOM_BITS: usize = 40;

/// Estimates from `sum` down to the first value at or below `max`, each the
/// previous divided by `1 + eps` and rounded up to a multiple of `2^-40`.
/// Consecutive values differ by at most a factor `1 + eps`.
pub fn lb_grid(max: &Rational, sum: &Rational, eps: &Rational) -> Vec<Rational> {
    let mut out = vec![sum.clone()];
    if !max.is_positive() {
        return out;
    }
    let scale = Rational::from_integer(BigInt::one() << GRID_DENOM_BITS);
    let factor = Rational::one() + eps;
    while out.last().expect("non-empty") > max {
        let prev = out.last().expect("non-empty");
        let exact = prev / &factor;
        let rounded = (&exact * &scale).ceil() / &scale;
        out.push(if &rounded < prev { rounded } else { exact });
    }
    out
}

/// The instance after the reduction's preprocessing: terminal weights moved
/// into the budget, and vertices that are too heavy or unreachable on their
/// own stripped of reward.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub work: KnapOrientInstance,
    pub budget: Rational,
}

pub fn prepare(inst: &KnapOrientInstance) -> Result<Prepared> {
    let budget = inst.knap_budget.clone().unwrap_or_else(Rational::zero);
    let t = inst.terminals;
    let trivial = t.trivial_path();
    let residual = &budget - inst.weight(&trivial);
    if residual.is_negative() || inst.metric.path_length(&trivial) > inst.length_budget {
        return Err(DetError::NoFeasiblePath);
    }
    let mut work = inst.clone();
    for &v in &trivial {
        work.weights[v] = Rational::zero();
    }
    for v in 0..inst.n() {
        if t.contains(v) {
            continue;
        }
        let alone = inst.metric.path_length(&t.through(v));
        if work.weights[v] > residual || alone > inst.length_budget {
            work.rewards[v] = Rational::zero();
        }
    }
    work.knap_budget = Some(residual.clone());
    Ok(Prepared {
        work,
        budget: residual,
    })
}

/// One guess of the reduction: reweight by `lambda * lb / W` with
/// `lambda = 2/(alpha+2)`, solve the base problem, then either return a
/// single heavy vertex or the maximal prefix of positive-reweighted
/// vertices with reward at most `lambda * lb`.
pub fn reduce_with_guess(
    base: &dyn OrienteeringSolver,
    prep: &Prepared,
    lb: &Rational,
    alpha: &Rational,
) -> Result<Path> {
    let work = &prep.work;
    let t = work.terminals;
    let lambda = int(2) / (alpha + int(2));
    let coef = if prep.budget.is_positive() {
        &lambda * lb / &prep.budget
    } else {
        Rational::zero()
    };
    let reweighted: Vec<Rational> = (0..work.n())
        .map(|v| {
            let r = &work.rewards[v] - &coef * &work.weights[v];
            if r.is_positive() {
                r
            } else {
                Rational::zero()
            }
        })
        .collect();
    let tau = base.solve(&work.with_rewards(reweighted.clone()).without_knapsack())?.path;
    check_route(&work.metric, t, work.length_budget, &tau).map_err(DetError::Infeasible)?;

    let heavy = lb / (alpha + int(2));
    let mut pick: Option<usize> = None;
    for &v in &tau {
        if work.rewards[v] >= heavy && pick.is_none_or(|p| work.rewards[v] > work.rewards[p]) {
            pick = Some(v);
        }
    }
    if let Some(v) = pick {
        return Ok(t.through(v));
    }

    let cap = &lambda * lb;
    let mut acc = Rational::zero();
    let mut path = vec![t.start];
    for &v in &tau {
        if t.contains(v) || !reweighted[v].is_positive() {
            continue;
        }
        let next = &acc + &work.rewards[v];
        if next <= cap {
            acc = next;
            path.push(v);
        }
    }
    if let Some(e) = t.end {
        if e != t.start {
            path.push(e);
        }
    }
    Ok(path)
}

/// Runs the reduction for every estimate on the grid and returns the best
/// feasible path (ties go to the larger estimate).
pub fn lagrangian_knap_reduce(
    base: &dyn OrienteeringSolver,
    inst: &KnapOrientInstance,
    eps: &Rational,
) -> Result<Solution> {
    if inst.knap_budget.is_none() {
        return base.solve(inst);
    }
    if !eps.is_positive() {
        return Err(DetError::InvalidInstance("epsilon must be positive".into()));
    }
    let prep = prepare(inst)?;
    let alpha = base.alpha();
    let trivial = inst.terminals.trivial_path();
    let mut best = Solution {
        reward: inst.reward(&trivial),
        path: trivial,
    };
    let max = prep.work.rewards.iter().max().cloned().unwrap_or_else(Rational::zero);
    let sum: Rational = prep.work.rewards.iter().sum();
    if max.is_positive() {
        for lb in lb_grid(&max, &sum, eps) {
            let path = reduce_with_guess(base, &prep, &lb, &alpha)?;
            check_knap_orient(inst, &path).map_err(DetError::Infeasible)?;
            let reward = inst.reward(&path);
            if reward > best.reward {
                best = Solution { reward, path };
            }
        }
    }
    Ok(best)
}

pub fn default_eps() -> Rational {
    ratio(1, 100)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Terminals;
    use corrko_core::FiniteMetric;

    #[test]
    fn grid_steps_are_bounded() {
        let eps = ratio(1, 100);
        let g = lb_grid(&int(3), &int(40), &eps);
        assert_eq!(g[0], int(40));
        assert!(g.last().unwrap() <= &int(3));
        assert!(g[g.len() - 2] > int(3));
        for w in g.windows(2) {
            assert!(w[1] < w[0]);
            assert!(&w[1] * (Rational::one() + &eps) >= w[0]);
        }
    }

    #[test]
    fn heavy_single_vertex_short_circuits() {
        // One vertex carries almost all reward.
        let inst = KnapOrientInstance::new(
            FiniteMetric::single_location(4),
            Terminals::rooted(0),
            0,
            vec![int(0), int(100), int(1), int(1)],
            vec![int(0), int(3), int(1), int(1)],
            Some(int(3)),
        )
        .unwrap();
        let prep = prepare(&inst).unwrap();
        let p = reduce_with_guess(&ExactOrienteering, &prep, &int(100), &int(1)).unwrap();
        assert_eq!(p, vec![0, 1]);
        let s = lagrangian_knap_reduce(&ExactOrienteering, &inst, &default_eps()).unwrap();
        assert_eq!(s.reward, int(100));
    }

    #[test]
    fn terminal_weight_comes_out_of_the_budget() {
        let inst = KnapOrientInstance::new(
            FiniteMetric::single_location(3),
            Terminals::p2p(0, 2),
            0,
            vec![int(0), int(4), int(0)],
            vec![int(1), int(2), int(1)],
            Some(int(3)),
        )
        .unwrap();
        let prep = prepare(&inst).unwrap();
        assert_eq!(prep.budget, int(1));
        assert_eq!(prep.work.rewards[1], int(0));
        let s = lagrangian_knap_reduce(&ExactOrienteering, &inst, &default_eps()).unwrap();
        assert_eq!(s.path, vec![0, 2]);
        let over = KnapOrientInstance {
            knap_budget: Some(int(1)),
            ..inst
        };
        assert_eq!(lagrangian_knap_reduce(&ExactOrienteering, &over, &default_eps()), Err(DetError::NoFeasiblePath));
    }
}
