//! Splitting an instance into its small-reward part, the large-reward part
//! on vertices that are rarely large, and the large-reward part on vertices
//! that are usually large; plus solvers for the first and last.

use corrko_core::rational::{from_biguint, int, ratio, Rational};
use corrko_core::{split_rewards, CorrKOInstance};
use corrko_detsolve::{KnapOrientInstance, Terminals};
use num::bigint::BigUint;
use num::traits::Zero;

use crate::error::Result;
use crate::knap::{solve_knap, KnapRun, KnapSolver};
use crate::randomized::RandomizedPolicy;
use crate::structure::best_single_vertex;

/// A sub-instance on the root plus some vertices; `ids[i]` is the original
/// id of vertex `i`.
#[derive(Debug, Clone)]
pub struct SubInstance {
    pub inst: CorrKOInstance,
    pub ids: Vec<usize>,
}

impl SubInstance {
    pub fn is_trivial(&self) -> bool {
        self.inst.n() == 1
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Rewards of small outcomes only, on every vertex.
    pub small: CorrKOInstance,
    /// Rewards of large outcomes, on vertices with `0 < Pr[S > W/2] ≤ 1/2`.
    /// Vertices that are never large earn nothing here and are dropped.
    pub rare_large: SubInstance,
    /// Rewards of large outcomes, on vertices with `Pr[S > W/2] > 1/2`.
    pub heavy: SubInstance,
}

pub fn prob_large(inst: &CorrKOInstance, v: usize) -> Rational {
    inst.dist(v).prob_size_ge(&(inst.half_w() + 1u32))
}

pub fn decompose_difficult(inst: &CorrKOInstance) -> Decomposition {
    let (large, small) = split_rewards(inst);
    let half = ratio(1, 2);
    let (rare, heavy): (Vec<usize>, Vec<usize>) = inst
        .non_root()
        .filter(|&v| !prob_large(inst, v).is_zero())
        .partition(|&v| prob_large(inst, v) <= half);
    let sub = |keep: &[usize]| {
        let (inst, ids) = large.restrict(keep);
        SubInstance { inst, ids }
    };
    Decomposition {
        small,
        rare_large: sub(&rare),
        heavy: sub(&heavy),
    }
}

/// Knapsack orienteering for the small part: rewards `E[Ř_v]`, weights
/// `E[min(S_v, W)]`, knapsack budget `2W`.
pub fn small_knap_instance(small: &CorrKOInstance) -> Result<KnapOrientInstance> {
    let w = small.w();
    let zero = BigUint::zero();
    let rewards = (0..small.n()).map(|v| small.pi(v, &zero)).collect();
    let weights = small
        .dists()
        .iter()
        .map(|d| {
            d.atoms()
                .iter()
                .map(|a| &a.prob * from_biguint(&a.size.clone().min(w.clone())))
                .sum()
        })
        .collect();
    Ok(KnapOrientInstance::new(
        small.metric().clone(),
        Terminals::rooted(small.root()),
        small.b(),
        rewards,
        weights,
        Some(int(2) * from_biguint(w)),
    )?)
}

/// The thinning rate applied to the small-part path.
pub fn small_keep() -> Rational {
    ratio(1, 8)
}

#[derive(Debug, Clone)]
pub struct PartRun {
    pub policy: RandomizedPolicy,
    /// Guaranteed factor against the part's adaptive optimum.
    pub beta: Rational,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct SmallRun {
    pub knap: KnapRun,
    pub part: PartRun,
}

pub fn solve_small(small: &CorrKOInstance, solver: KnapSolver) -> Result<SmallRun> {
    let knap_inst = small_knap_instance(small)?;
    let knap = solve_knap(&knap_inst, solver)?;
    let policy = RandomizedPolicy::Thinned {
        path: knap.solution.path.clone(),
        keep: small_keep(),
    };
    let value = policy.exact_value(small)?;
    Ok(SmallRun {
        knap,
        part: PartRun {
            policy,
            beta: int(16) * solver.alpha(),
            value,
        },
    })
}

/// Visits the reachable vertex with the largest expected reward.
pub fn solve_heavy(heavy: &SubInstance) -> Result<PartRun> {
    let inst = &heavy.inst;
    let policy = match best_single_vertex(inst) {
        Some((v, _)) => RandomizedPolicy::Fixed(corrko_core::NonAdaptivePolicy::new(vec![inst.root(), v])),
        None => RandomizedPolicy::root_only(inst),
    };
    let value = policy.exact_value(inst)?;
    Ok(PartRun {
        policy: policy.map_vertices(&heavy.ids),
        beta: int(4),
        value,
    })
}

#[derive(Debug, Clone)]
pub struct DecomposedRun {
    pub small: PartRun,
    pub rare_large: PartRun,
    pub heavy: PartRun,
    pub policy: RandomizedPolicy,
    /// `β1 + β2 + β3`, the end-to-end factor.
    pub factor: Rational,
    pub value: Rational,
}

/// Mixes the three part policies with probabilities proportional to their
/// factors. `rare_large` must already be lifted to the original ids.
pub fn mix_parts(inst: &CorrKOInstance, small: PartRun, rare_large: PartRun, heavy: PartRun) -> Result<DecomposedRun> {
    let factor = &small.beta + &rare_large.beta + &heavy.beta;
    let policy = RandomizedPolicy::mix(vec![
        (small.beta.clone(), small.policy.clone()),
        (rare_large.beta.clone(), rare_large.policy.clone()),
        (heavy.beta.clone(), heavy.policy.clone()),
    ]);
    let value = policy.exact_value(inst)?;
    Ok(DecomposedRun {
        small,
        rare_large,
        heavy,
        policy,
        factor,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::{Atom, FiniteMetric, JointDistribution};

    fn two_atom(s1: u32, r1: i64, s2: u32, r2: i64, p: Rational) -> JointDistribution {
        JointDistribution::new(vec![
            Atom::new(s1, int(r1), p.clone()),
            Atom::new(s2, int(r2), int(1) - p),
        ])
        .unwrap()
    }

    #[test]
    fn parts_partition_the_vertices() {
        let dists = vec![
            JointDistribution::zero(),
            two_atom(5, 4, 1, 2, ratio(1, 4)),
            two_atom(5, 3, 0, 0, ratio(3, 4)),
            JointDistribution::point(2u32, int(1)),
        ];
        let inst = CorrKOInstance::new(FiniteMetric::single_location(4), 0, BigUint::from(6u32), dists).unwrap();
        let d = decompose_difficult(&inst);
        assert_eq!(d.rare_large.ids, vec![0, 1]);
        assert_eq!(d.heavy.ids, vec![0, 2]);
        let rewards = |i: &CorrKOInstance, v: usize| -> Vec<Rational> {
            i.dist(v).atoms().iter().map(|a| a.reward.clone()).collect()
        };
        assert_eq!(rewards(&d.small, 1), vec![int(0), int(2)]);
        assert_eq!(rewards(&d.rare_large.inst, 1), vec![int(4), int(0)]);
        assert_eq!(rewards(&d.heavy.inst, 1), vec![int(3), int(0)]);
        let h = solve_heavy(&d.heavy).unwrap();
        assert_eq!(h.policy, RandomizedPolicy::Fixed(corrko_core::NonAdaptivePolicy::new(vec![0, 2])));
        assert_eq!(h.value, ratio(9, 4));
    }

    #[test]
    fn no_large_atoms_leaves_only_the_small_part() {
        let dists = vec![JointDistribution::zero(), JointDistribution::point(1u32, int(2))];
        let inst = CorrKOInstance::new(FiniteMetric::single_location(2), 0, BigUint::from(4u32), dists).unwrap();
        let d = decompose_difficult(&inst);
        assert_eq!(d.small, inst);
        assert!(d.heavy.is_trivial());
        assert!(d.rare_large.is_trivial());
    }
}
