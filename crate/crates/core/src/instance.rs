use num::bigint::BigUint;
use num::traits::{ToPrimitive, Zero};

use crate::dist::JointDistribution;
use crate::error::{CoreError, Result};
use crate::metric::FiniteMetric;
use crate::rational::Rational;
use crate::stats::start_reward;

/// A CorrKO instance: metric, budgets and per-vertex job distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrKOInstance {
    metric: FiniteMetric,
    travel_budget: u64,
    processing_budget: BigUint,
    dists: Vec<JointDistribution>,
}

impl CorrKOInstance {
    pub fn new(
        metric: FiniteMetric,
        travel_budget: u64,
        processing_budget: BigUint,
        dists: Vec<JointDistribution>,
    ) -> Result<Self> {
        if dists.len() != metric.n() {
            return Err(CoreError::InvalidInstance(format!(
                "{} distributions for {} vertices",
                dists.len(),
                metric.n()
            )));
        }
        if processing_budget.is_zero() {
            return Err(CoreError::InvalidInstance("W must be positive".into()));
        }
        if !dists[metric.root()].is_zero() {
            return Err(CoreError::InvalidInstance(
                "root distribution must be the single atom (0, 0, 1)".into(),
            ));
        }
        let n = metric.n();
        for u in 0..n {
            if metric.d(u, u) != 0 {
                return Err(CoreError::InvalidMetric(format!("d({u},{u}) != 0")));
            }
            for v in u + 1..n {
                if metric.d(u, v) != metric.d(v, u) {
                    return Err(CoreError::InvalidMetric(format!("d({u},{v}) != d({v},{u})")));
                }
            }
        }
        Ok(Self {
            metric,
            travel_budget,
            processing_budget,
            dists,
        })
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn root(&self) -> usize {
        self.metric.root()
    }

    pub fn metric(&self) -> &FiniteMetric {
        &self.metric
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> u64 {
        self.metric.d(u, v)
    }

    /// Travel budget `B`.
    pub fn b(&self) -> u64 {
        self.travel_budget
    }

    /// Processing budget `W`.
    pub fn w(&self) -> &BigUint {
        &self.processing_budget
    }

    pub fn w_u64(&self) -> Option<u64> {
        self.processing_budget.to_u64()
    }

    /// `floor(W/2)`; an atom is large iff its size exceeds this.
    pub fn half_w(&self) -> BigUint {
        &self.processing_budget >> 1u32
    }

    pub fn dist(&self, v: usize) -> &JointDistribution {
        &self.dists[v]
    }

    pub fn dists(&self) -> &[JointDistribution] {
        &self.dists
    }

    /// `π_v(t)`.
    pub fn pi(&self, v: usize, t: &BigUint) -> Rational {
        start_reward(&self.dists[v], t, &self.processing_budget)
    }

    /// Vertices other than the root, ascending.
    pub fn non_root(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&v| v != self.root())
    }

    pub fn with_dists(&self, dists: Vec<JointDistribution>) -> Result<Self> {
        Self::new(
            self.metric.clone(),
            self.travel_budget,
            self.processing_budget.clone(),
            dists,
        )
    }

    /// Sub-instance on the root plus `keep` (root first, then `keep` in
    /// order). Returns the instance and the map from new to old ids.
    pub fn restrict(&self, keep: &[usize]) -> (Self, Vec<usize>) {
        let mut ids = vec![self.root()];
        ids.extend(keep.iter().copied().filter(|&v| v != self.root()));
        let metric = self.metric.restrict(&ids, 0);
        let dists = ids.iter().map(|&v| self.dists[v].clone()).collect();
        let inst = Self {
            metric,
            travel_budget: self.travel_budget,
            processing_budget: self.processing_budget.clone(),
            dists,
        };
        (inst, ids)
    }
}

/// Splits rewards into the large part (atoms of size `> floor(W/2)`) and the
/// small part. Sizes and probabilities are unchanged.
pub fn split_rewards(inst: &CorrKOInstance) -> (CorrKOInstance, CorrKOInstance) {
    let half = inst.half_w();
    let zero = Rational::zero();
    let large = inst
        .dists()
        .iter()
        .map(|d| d.map_rewards(|a| if a.size > half { a.reward.clone() } else { zero.clone() }))
        .collect();
    let small = inst
        .dists()
        .iter()
        .map(|d| d.map_rewards(|a| if a.size > half { zero.clone() } else { a.reward.clone() }))
        .collect();
    (
        inst.with_dists(large).expect("same shape"),
        inst.with_dists(small).expect("same shape"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Atom;
    use crate::rational::{int, ratio};

    fn two_vertex(atoms: Vec<Atom>, w: u32) -> CorrKOInstance {
        CorrKOInstance::new(
            FiniteMetric::new(vec![vec![0, 1], vec![1, 0]], 0).unwrap(),
            5,
            BigUint::from(w),
            vec![JointDistribution::zero(), JointDistribution::new(atoms).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn split_at_half_budget() {
        let inst = two_vertex(
            vec![
                Atom::new(2u32, int(3), ratio(1, 2)),
                Atom::new(6u32, int(7), ratio(1, 2)),
            ],
            8,
        );
        let (large, small) = split_rewards(&inst);
        let rewards = |i: &CorrKOInstance| -> Vec<Rational> {
            i.dist(1).atoms().iter().map(|a| a.reward.clone()).collect()
        };
        assert_eq!(rewards(&large), vec![int(0), int(7)]);
        assert_eq!(rewards(&small), vec![int(3), int(0)]);
    }

    #[test]
    fn split_uses_floor_of_half() {
        // W = 9: floor(W/2) = 4, so size 4 is small and size 5 is large.
        let inst = two_vertex(
            vec![
                Atom::new(4u32, int(1), ratio(1, 2)),
                Atom::new(5u32, int(1), ratio(1, 2)),
            ],
            9,
        );
        let (large, small) = split_rewards(&inst);
        assert_eq!(large.dist(1).atoms()[0].reward, int(0));
        assert_eq!(small.dist(1).atoms()[1].reward, int(0));
    }

    #[test]
    fn all_small_sizes() {
        let inst = two_vertex(vec![Atom::new(1u32, int(2), int(1))], 8);
        let (large, small) = split_rewards(&inst);
        assert_eq!(small, inst);
        assert_eq!(large.dist(1).expected_reward(), int(0));
    }

    #[test]
    fn root_must_be_zero() {
        let r = CorrKOInstance::new(
            FiniteMetric::single_location(1),
            0,
            BigUint::from(1u32),
            vec![JointDistribution::point(1u32, int(0))],
        );
        assert!(r.is_err());
    }

    #[test]
    fn restrict_keeps_root_first() {
        let inst = two_vertex(vec![Atom::new(1u32, int(2), int(1))], 8);
        let (sub, ids) = inst.restrict(&[1]);
        assert_eq!(ids, vec![0, 1]);
        assert_eq!(sub, inst);
    }
}
