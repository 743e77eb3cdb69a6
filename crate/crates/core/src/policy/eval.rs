use std::collections::BTreeMap;

use num::bigint::BigUint;
use num::traits::{One, Zero};

use super::{check_sequence, AdaptivePolicyTree, CancellationPolicy, NonAdaptivePolicy, Threshold};
use crate::dist::JointDistribution;
use crate::error::{CoreError, Result};
use crate::instance::CorrKOInstance;
use crate::rational::Rational;
use crate::stats::start_reward;

/// Sub-probability distribution of elapsed processing time over executions
/// that are still running (have not overflowed `W`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElapsedDist {
    mass: BTreeMap<BigUint, Rational>,
}

impl ElapsedDist {
    /// All mass at elapsed time zero.
    pub fn start() -> Self {
        let mut mass = BTreeMap::new();
        mass.insert(BigUint::zero(), Rational::one());
        Self { mass }
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn total(&self) -> Rational {
        self.mass.values().sum()
    }

    pub fn min_elapsed(&self) -> Option<&BigUint> {
        self.mass.keys().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.mass.iter()
    }

    /// Runs one job: returns its expected reward and the surviving states.
    pub fn process(&self, dist: &JointDistribution, w: &BigUint) -> (Rational, ElapsedDist) {
        let mut reward = Rational::zero();
        let mut next: BTreeMap<BigUint, Rational> = BTreeMap::new();
        for (e, pe) in &self.mass {
            for atom in dist.atoms() {
                let c = e + &atom.size;
                if &c > w {
                    continue;
                }
                let p = pe * &atom.prob;
                reward += &p * &atom.reward;
                *next.entry(c).or_insert_with(Rational::zero) += p;
            }
        }
        (reward, ElapsedDist { mass: next })
    }

    /// Runs one job that is cancelled after `threshold` time units.
    fn process_cancellable(
        &self,
        dist: &JointDistribution,
        thresholds: &[(Threshold, Rational)],
        w: &BigUint,
    ) -> (Rational, ElapsedDist) {
        let mut reward = Rational::zero();
        let mut next: BTreeMap<BigUint, Rational> = BTreeMap::new();
        for (e, pe) in &self.mass {
            for (th, pt) in thresholds {
                let pet = pe * pt;
                for atom in dist.atoms() {
                    let (c, pays) = match th {
                        Threshold::At(t) if atom.size > BigUint::from(*t) => (e + *t, false),
                        _ => (e + &atom.size, true),
                    };
                    if &c > w {
                        continue;
                    }
                    let p = &pet * &atom.prob;
                    if pays {
                        reward += &p * &atom.reward;
                    }
                    *next.entry(c).or_insert_with(Rational::zero) += p;
                }
            }
        }
        (reward, ElapsedDist { mass: next })
    }

    /// `Σ_e P(e) π(e)`: the reward of processing `dist` next.
    pub fn expected_start_reward(&self, dist: &JointDistribution, w: &BigUint) -> Rational {
        self.mass
            .iter()
            .map(|(e, p)| p * start_reward(dist, e, w))
            .sum()
    }

    /// Drops every state with elapsed time above `limit`.
    pub fn truncate_above(&mut self, limit: &BigUint) {
        let _ = self.mass.split_off(&(limit + 1u32));
    }

    /// Whether `self`'s cumulative mass is pointwise at least `other`'s.
    pub fn cdf_dominates(&self, other: &ElapsedDist) -> bool {
        let mut a = self.mass.iter().peekable();
        let mut fa = Rational::zero();
        let mut fb = Rational::zero();
        for (t, pb) in &other.mass {
            while let Some((ta, pa)) = a.peek() {
                if *ta <= t {
                    fa += *pa;
                    a.next();
                } else {
                    break;
                }
            }
            fb += pb;
            if fa < fb {
                return false;
            }
        }
        true
    }
}

/// Exact expected reward of a fixed visiting order.
pub fn eval_nonadaptive_exact(inst: &CorrKOInstance, pol: &NonAdaptivePolicy) -> Result<Rational> {
    check_sequence(inst, &pol.sequence)?;
    let mut state = ElapsedDist::start();
    let mut total = Rational::zero();
    let mut travel = 0u64;
    for w in pol.sequence.windows(2) {
        travel += inst.d(w[0], w[1]);
        if travel > inst.b() || state.is_empty() {
            break;
        }
        let (r, next) = state.process(inst.dist(w[1]), inst.w());
        total += r;
        state = next;
    }
    Ok(total)
}

/// Exact expected reward with independent per-vertex cancellation thresholds.
pub fn eval_cancellation_exact(inst: &CorrKOInstance, pol: &CancellationPolicy) -> Result<Rational> {
    pol.check(inst)?;
    let mut state = ElapsedDist::start();
    let mut total = Rational::zero();
    let mut travel = 0u64;
    for i in 1..pol.sequence.len() {
        travel += inst.d(pol.sequence[i - 1], pol.sequence[i]);
        if travel > inst.b() || state.is_empty() {
            break;
        }
        let (r, next) =
            state.process_cancellable(inst.dist(pol.sequence[i]), &pol.thresholds[i], inst.w());
        total += r;
        state = next;
    }
    Ok(total)
}

/// Exact expected reward of an adaptive tree, `Σ_nodes reach · π_v(i_v)`,
/// after re-deriving every annotation.
pub fn eval_adaptive_exact(inst: &CorrKOInstance, tree: &AdaptivePolicyTree) -> Result<Rational> {
    let bad = |m: String| CoreError::InvalidPolicy(m);
    let nodes = tree.nodes();
    let root = nodes.first().ok_or_else(|| bad("empty tree".into()))?;
    if root.vertex != inst.root()
        || !root.reach.is_one()
        || !root.elapsed.is_zero()
        || root.travel != 0
        || root.parent.is_some()
    {
        return Err(bad("root node must be the root vertex with trivial annotations".into()));
    }
    let mut total = Rational::zero();
    let mut seen = 0usize;
    let mut on_path = vec![false; inst.n()];
    // Iterative DFS with explicit enter/leave markers for the path set.
    let mut stack = vec![(0usize, true)];
    while let Some((i, enter)) = stack.pop() {
        let node = nodes.get(i).ok_or_else(|| bad(format!("dangling child {i}")))?;
        if !enter {
            on_path[node.vertex] = false;
            continue;
        }
        seen += 1;
        if node.vertex >= inst.n() {
            return Err(bad(format!("vertex {} out of range", node.vertex)));
        }
        if std::mem::replace(&mut on_path[node.vertex], true) {
            return Err(bad(format!("vertex {} repeated on a path", node.vertex)));
        }
        let atoms = inst.dist(node.vertex).atoms();
        if node.children.len() != atoms.len() {
            return Err(bad(format!("node {i} has the wrong number of branches")));
        }
        total += &node.reach * inst.pi(node.vertex, &node.elapsed);
        stack.push((i, false));
        for (a, child) in node.children.iter().enumerate().rev() {
            let Some(c) = *child else { continue };
            let ch = nodes.get(c).ok_or_else(|| bad(format!("dangling child {c}")))?;
            let e = &node.elapsed + &atoms[a].size;
            if &e > inst.w() {
                return Err(bad(format!("node {c} sits below an overflowing outcome")));
            }
            if ch.elapsed != e {
                return Err(bad(format!(
                    "node {c}: elapsed annotation {} but outcomes give {e}",
                    ch.elapsed
                )));
            }
            if ch.reach != &node.reach * &atoms[a].prob {
                return Err(bad(format!("node {c}: inconsistent reach probability")));
            }
            if ch.travel != node.travel + inst.d(node.vertex, ch.vertex) || ch.travel > inst.b() {
                return Err(bad(format!("node {c}: travel annotation wrong or over budget")));
            }
            if ch.parent != Some((i, a)) {
                return Err(bad(format!("node {c}: wrong parent link")));
            }
            stack.push((c, true));
        }
    }
    if seen != nodes.len() {
        return Err(bad("tree has unreachable nodes".into()));
    }
    Ok(total)
}

const MAX_THINNED: usize = 20;

fn subsets_of<'a>(path: &'a [usize]) -> Result<impl Iterator<Item = (u32, Vec<usize>)> + 'a> {
    let m = path.len().saturating_sub(1);
    if m > MAX_THINNED {
        return Err(CoreError::InvalidPolicy(format!(
            "{m} vertices is too many for subset enumeration (max {MAX_THINNED})"
        )));
    }
    Ok((0u64..1 << m).map(move |mask| {
        let mut seq = vec![path[0]];
        seq.extend((0..m).filter(|i| mask >> i & 1 == 1).map(|i| path[i + 1]));
        (mask.count_ones(), seq)
    }))
}

/// Expected reward when every non-root vertex of `path` is kept
/// independently with probability `q`.
pub fn thinned_value_exact(inst: &CorrKOInstance, path: &[usize], q: &Rational) -> Result<Rational> {
    let m = path.len().saturating_sub(1) as u32;
    let nq = Rational::one() - q;
    let mut total = Rational::zero();
    for (k, seq) in subsets_of(path)? {
        let p = num::pow(q.clone(), k as usize) * num::pow(nq.clone(), (m - k) as usize);
        if p.is_zero() {
            continue;
        }
        total += p * eval_nonadaptive_exact(inst, &NonAdaptivePolicy::new(seq))?;
    }
    Ok(total)
}

/// The best sub-sequence of `path` (first found on ties).
pub fn thinned_best_subset(
    inst: &CorrKOInstance,
    path: &[usize],
) -> Result<(Rational, NonAdaptivePolicy)> {
    let mut best: Option<(Rational, NonAdaptivePolicy)> = None;
    for (_, seq) in subsets_of(path)? {
        let pol = NonAdaptivePolicy::new(seq);
        let v = eval_nonadaptive_exact(inst, &pol)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, pol));
        }
    }
    Ok(best.expect("at least the root-only subset"))
}
