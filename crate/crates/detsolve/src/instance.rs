//! Deterministic routing instances.

use corrko_core::{FiniteMetric, Rational};
use num::traits::{Signed, Zero};

use crate::error::{DetError, Result};

pub type Path = Vec<usize>;

/// Path endpoints: rooted paths fix only the start, point-to-point paths fix
/// both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Terminals {
    pub start: usize,
    pub end: Option<usize>,
}

impl Terminals {
    pub fn rooted(start: usize) -> Self {
        Self { start, end: None }
    }

    pub fn p2p(start: usize, end: usize) -> Self {
        Self {
            start,
            end: Some(end),
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        v == self.start || self.end == Some(v)
    }

    /// The shortest path touching the terminals only.
    pub fn trivial_path(&self) -> Path {
        match self.end {
            Some(e) if e != self.start => vec![self.start, e],
            _ => vec![self.start],
        }
    }

    /// The path whose only non-terminal node is `v`.
    pub fn through(&self, v: usize) -> Path {
        if self.contains(v) {
            return self.trivial_path();
        }
        let mut p = vec![self.start, v];
        if let Some(e) = self.end {
            p.push(e);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub reward: Rational,
    pub path: Path,
}

fn check_common(
    metric: &FiniteMetric,
    terminals: Terminals,
    vectors: &[(&str, &[Rational])],
) -> Result<()> {
    let n = metric.n();
    if terminals.start >= n || terminals.end.is_some_and(|e| e >= n) {
        return Err(DetError::InvalidInstance("terminal out of range".into()));
    }
    for (name, v) in vectors {
        if v.len() != n {
            return Err(DetError::InvalidInstance(format!(
                "{name} has {} entries for {n} vertices",
                v.len()
            )));
        }
        if let Some(i) = v.iter().position(|x| x.is_negative()) {
            return Err(DetError::InvalidInstance(format!("{name}[{i}] is negative")));
        }
    }
    Ok(())
}

pub fn path_reward(rewards: &[Rational], path: &[usize]) -> Rational {
    path.iter().map(|&v| &rewards[v]).sum()
}

/// Orienteering with an optional knapsack constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapOrientInstance {
    pub metric: FiniteMetric,
    pub terminals: Terminals,
    pub length_budget: u64,
    pub rewards: Vec<Rational>,
    pub weights: Vec<Rational>,
    /// `None` disables the knapsack constraint.
    pub knap_budget: Option<Rational>,
}

impl KnapOrientInstance {
    pub fn new(
        metric: FiniteMetric,
        terminals: Terminals,
        length_budget: u64,
        rewards: Vec<Rational>,
        weights: Vec<Rational>,
        knap_budget: Option<Rational>,
    ) -> Result<Self> {
        check_common(
            &metric,
            terminals,
            &[("rewards", &rewards), ("weights", &weights)],
        )?;
        if knap_budget.as_ref().is_some_and(|w| w.is_negative()) {
            return Err(DetError::InvalidInstance("negative knapsack budget".into()));
        }
        Ok(Self {
            metric,
            terminals,
            length_budget,
            rewards,
            weights,
            knap_budget,
        })
    }

    /// Plain orienteering: zero weights and no knapsack.
    pub fn orienteering(
        metric: FiniteMetric,
        terminals: Terminals,
        length_budget: u64,
        rewards: Vec<Rational>,
    ) -> Result<Self> {
        let n = metric.n();
        Self::new(
            metric,
            terminals,
            length_budget,
            rewards,
            vec![Rational::zero(); n],
            None,
        )
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn reward(&self, path: &[usize]) -> Rational {
        path_reward(&self.rewards, path)
    }

    pub fn weight(&self, path: &[usize]) -> Rational {
        path_reward(&self.weights, path)
    }

    pub fn with_rewards(&self, rewards: Vec<Rational>) -> Self {
        Self {
            rewards,
            ..self.clone()
        }
    }

    pub fn without_knapsack(&self) -> Self {
        Self {
            knap_budget: None,
            ..self.clone()
        }
    }
}

/// Orienteering with knapsack deadlines: the weight of the path prefix up
/// to and including `v` may not exceed `deadlines[v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientKdInstance {
    pub metric: FiniteMetric,
    pub terminals: Terminals,
    pub length_budget: u64,
    pub rewards: Vec<Rational>,
    pub weights: Vec<Rational>,
    pub deadlines: Vec<Rational>,
}

impl OrientKdInstance {
    pub fn new(
        metric: FiniteMetric,
        terminals: Terminals,
        length_budget: u64,
        rewards: Vec<Rational>,
        weights: Vec<Rational>,
        deadlines: Vec<Rational>,
    ) -> Result<Self> {
        check_common(
            &metric,
            terminals,
            &[
                ("rewards", &rewards),
                ("weights", &weights),
                ("deadlines", &deadlines),
            ],
        )?;
        Ok(Self {
            metric,
            terminals,
            length_budget,
            rewards,
            weights,
            deadlines,
        })
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn reward(&self, path: &[usize]) -> Rational {
        path_reward(&self.rewards, path)
    }

    pub fn root(&self) -> usize {
        self.terminals.start
    }

    /// Vertices that can appear on some feasible path (`wt_v <= KD_v`).
    pub fn usable(&self, v: usize) -> bool {
        self.weights[v] <= self.deadlines[v]
    }

    /// Rooted normalization: zero root reward and weight, deadlines shifted
    /// by the root weight, unusable vertices stripped of reward.
    pub fn normalized(&self) -> Result<Self> {
        if self.terminals.end.is_some() {
            return Err(DetError::InvalidInstance("rooted instance required".into()));
        }
        let r = self.root();
        if !self.usable(r) {
            return Err(DetError::NoFeasiblePath);
        }
        let shift = self.weights[r].clone();
        let mut out = self.clone();
        out.weights[r] = Rational::zero();
        out.rewards[r] = Rational::zero();
        for v in 0..self.n() {
            out.deadlines[v] = if v == r {
                Rational::zero()
            } else {
                &self.deadlines[v] - &shift
            };
            // A negative deadline leaves the vertex unusable.
            if !out.usable(v) {
                out.rewards[v] = Rational::zero();
            }
        }
        Ok(out)
    }

    pub fn max_deadline(&self) -> Rational {
        self.deadlines
            .iter()
            .cloned()
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// OrientKD with an extra global knapsack `Σ extra_weights <= extra_budget`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapOkdInstance {
    pub okd: OrientKdInstance,
    pub extra_weights: Vec<Rational>,
    pub extra_budget: Rational,
}

impl KnapOkdInstance {
    pub fn new(okd: OrientKdInstance, extra_weights: Vec<Rational>, extra_budget: Rational) -> Result<Self> {
        check_common(&okd.metric, okd.terminals, &[("extra weights", &extra_weights)])?;
        if extra_budget.is_negative() {
            return Err(DetError::InvalidInstance("negative extra budget".into()));
        }
        Ok(Self {
            okd,
            extra_weights,
            extra_budget,
        })
    }

    pub fn n(&self) -> usize {
        self.okd.n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::rational::int;

    #[test]
    fn terminal_paths() {
        let t = Terminals::p2p(0, 3);
        assert_eq!(t.trivial_path(), vec![0, 3]);
        assert_eq!(t.through(2), vec![0, 2, 3]);
        assert_eq!(t.through(3), vec![0, 3]);
        assert_eq!(Terminals::rooted(1).through(0), vec![1, 0]);
    }

    #[test]
    fn rejects_bad_lengths_and_signs() {
        let m = FiniteMetric::single_location(2);
        assert!(KnapOrientInstance::orienteering(m.clone(), Terminals::rooted(0), 0, vec![int(1)]).is_err());
        assert!(KnapOrientInstance::orienteering(m.clone(), Terminals::rooted(0), 0, vec![int(1), int(-1)]).is_err());
        assert!(KnapOrientInstance::orienteering(m, Terminals::rooted(2), 0, vec![int(1), int(1)]).is_err());
    }

    #[test]
    fn normalization_shifts_root_weight() {
        let inst = OrientKdInstance::new(
            FiniteMetric::single_location(3),
            Terminals::rooted(0),
            0,
            vec![int(5), int(1), int(1)],
            vec![int(2), int(1), int(3)],
            vec![int(2), int(4), int(4)],
        )
        .unwrap();
        let n = inst.normalized().unwrap();
        assert_eq!(n.rewards, vec![int(0), int(1), int(0)]);
        assert_eq!(n.deadlines[1], int(2));
        assert!(!n.usable(2));
    }
}
