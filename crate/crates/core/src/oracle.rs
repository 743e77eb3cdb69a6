//! Exact optima for small instances.

use std::collections::HashMap;
use std::fmt;

use num::bigint::BigUint;
use num::traits::{Signed, Zero};

use crate::error::{CoreError, Result};
use crate::instance::CorrKOInstance;
use crate::policy::{AdaptivePolicyTree, ElapsedDist, NonAdaptivePolicy, TreeShape};
use crate::rational::Rational;

/// Size limits for the brute-force oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_vertices: usize,
    pub max_w: u64,
    pub max_states: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self {
            max_vertices: 8,
            max_w: 64,
            max_states: 2_000_000,
        }
    }
}

impl OracleCaps {
    pub fn check(&self, inst: &CorrKOInstance) -> Result<()> {
        if inst.n() > self.max_vertices {
            return Err(CoreError::CapExceeded {
                cap: "max_vertices",
                limit: self.max_vertices as u64,
            });
        }
        if inst.w() > &BigUint::from(self.max_w) {
            return Err(CoreError::CapExceeded {
                cap: "max_w",
                limit: self.max_w,
            });
        }
        Ok(())
    }

    fn state_cap(&self) -> CoreError {
        CoreError::CapExceeded {
            cap: "max_states",
            limit: self.max_states as u64,
        }
    }
}

type AdaptiveKey = (usize, u64, BigUint, u64);

struct AdaptiveSearch<'a> {
    inst: &'a CorrKOInstance,
    caps: OracleCaps,
    memo: HashMap<AdaptiveKey, (Rational, Option<usize>)>,
}

impl AdaptiveSearch<'_> {
    /// Optimal future reward after finishing `cur` with elapsed time `e`.
    fn value(&mut self, cur: usize, mask: u64, e: &BigUint, travel: u64) -> Result<Rational> {
        let key = (cur, mask, e.clone(), travel);
        if let Some((v, _)) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let inst = self.inst;
        let mut best = Rational::zero();
        let mut choice = None;
        for v in 0..inst.n() {
            if mask >> v & 1 == 1 {
                continue;
            }
            let t = travel + inst.d(cur, v);
            // A vertex that cannot pay from here is never worth a detour.
            if t > inst.b() || !inst.pi(v, e).is_positive() {
                continue;
            }
            let mut val = Rational::zero();
            for atom in inst.dist(v).atoms() {
                let c = e + &atom.size;
                if &c > inst.w() {
                    continue;
                }
                let future = self.value(v, mask | 1 << v, &c, t)?;
                val += &atom.prob * (&atom.reward + future);
            }
            if val > best {
                best = val;
                choice = Some(v);
            }
        }
        self.memo.insert(key, (best.clone(), choice));
        if self.memo.len() > self.caps.max_states {
            return Err(self.caps.state_cap());
        }
        Ok(best)
    }

    fn shape(&self, v: usize, mask: u64, e: &BigUint, travel: u64) -> TreeShape {
        let inst = self.inst;
        let mut s = TreeShape::leaf(v);
        for (a, atom) in inst.dist(v).atoms().iter().enumerate() {
            let c = e + &atom.size;
            if &c > inst.w() {
                continue;
            }
            if let Some((_, Some(next))) = self.memo.get(&(v, mask, c.clone(), travel)) {
                let t = travel + inst.d(v, *next);
                s.children.push((a, self.shape(*next, mask | 1 << next, &c, t)));
            }
        }
        s
    }
}

/// Optimal adaptive policy by memoized recursion over
/// (current vertex, visited set, elapsed time, travel used). Ties go to the
/// smallest vertex id, and stopping wins ties against continuing.
pub fn opt_adaptive(inst: &CorrKOInstance, caps: OracleCaps) -> Result<(Rational, AdaptivePolicyTree)> {
    caps.check(inst)?;
    if inst.n() > 64 {
        return Err(CoreError::CapExceeded {
            cap: "max_vertices",
            limit: 64,
        });
    }
    let mut s = AdaptiveSearch {
        inst,
        caps,
        memo: HashMap::new(),
    };
    let root = inst.root();
    let zero = BigUint::zero();
    let value = s.value(root, 1 << root, &zero, 0)?;
    let tree = AdaptivePolicyTree::from_shape(inst, &s.shape(root, 1 << root, &zero, 0))?;
    Ok((value, tree))
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct VertexSet(Vec<u64>);

impl VertexSet {
    fn new(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }
    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }
    fn toggle(&mut self, v: usize) {
        self.0[v / 64] ^= 1 << (v % 64);
    }
}

struct Label {
    travel: u64,
    reward: Rational,
    state: ElapsedDist,
}

impl Label {
    fn dominates(&self, other: &Label) -> bool {
        self.travel <= other.travel
            && self.reward >= other.reward
            && self.state.cdf_dominates(&other.state)
    }
}

struct NonAdaptiveSearch<'a> {
    inst: &'a CorrKOInstance,
    levels: Option<&'a [u32]>,
    max_states: usize,
    expanded: usize,
    best: Rational,
    best_seq: Vec<usize>,
    labels: Option<HashMap<(VertexSet, usize), Vec<Label>>>,
    min_paying: Vec<Option<BigUint>>,
}

impl NonAdaptiveSearch<'_> {
    fn dfs(
        &mut self,
        seq: &mut Vec<usize>,
        visited: &mut VertexSet,
        travel: u64,
        reward: Rational,
        mut state: ElapsedDist,
    ) -> Result<()> {
        self.expanded += 1;
        if self.expanded > self.max_states {
            return Err(CoreError::CapExceeded {
                cap: "max_states",
                limit: self.max_states as u64,
            });
        }
        if reward > self.best {
            self.best = reward.clone();
            self.best_seq = seq.clone();
        }
        let inst = self.inst;
        let last = *seq.last().expect("non-empty");
        let cands: Vec<usize> = (0..inst.n())
            .filter(|&v| {
                !visited.contains(v)
                    && self.min_paying[v].is_some()
                    && travel + inst.d(last, v) <= inst.b()
                    && self.levels.is_none_or(|l| l[v] < l[last])
            })
            .collect();
        if cands.is_empty() {
            return Ok(());
        }
        // States from which no candidate can ever pay are dead.
        let limit = cands
            .iter()
            .map(|&v| inst.w() - self.min_paying[v].as_ref().expect("filtered"))
            .max()
            .expect("non-empty");
        state.truncate_above(&limit);
        let Some(e_min) = state.min_elapsed().cloned() else {
            return Ok(());
        };
        let mass = state.total();
        let optimistic: Rational = cands.iter().map(|&v| inst.pi(v, &e_min)).sum();
        if &reward + &mass * optimistic <= self.best {
            return Ok(());
        }
        for v in cands {
            let t = travel + inst.d(last, v);
            let (r, next) = state.process(inst.dist(v), inst.w());
            let label = Label {
                travel: t,
                reward: &reward + r,
                state: next,
            };
            visited.toggle(v);
            if let Some(labels) = self.labels.as_mut() {
                let entry = labels.entry((visited.clone(), v)).or_default();
                if entry.iter().any(|l| l.dominates(&label)) {
                    visited.toggle(v);
                    continue;
                }
                entry.retain(|l| !label.dominates(l));
                entry.push(Label {
                    travel: label.travel,
                    reward: label.reward.clone(),
                    state: label.state.clone(),
                });
            }
            seq.push(v);
            self.dfs(seq, visited, t, label.reward, label.state)?;
            seq.pop();
            visited.toggle(v);
        }
        Ok(())
    }
}

fn search_nonadaptive(
    inst: &CorrKOInstance,
    levels: Option<&[u32]>,
    max_states: usize,
) -> Result<(Rational, NonAdaptivePolicy)> {
    let min_paying = inst
        .dists()
        .iter()
        .map(|d| d.min_rewarding_size().filter(|s| *s <= inst.w()).cloned())
        .collect();
    let mut s = NonAdaptiveSearch {
        inst,
        levels,
        max_states,
        expanded: 0,
        best: Rational::zero(),
        best_seq: vec![inst.root()],
        // With strictly decreasing levels the order is fixed by the visited
        // set, so dominance between labels can never fire.
        labels: if levels.is_none() {
            Some(HashMap::new())
        } else {
            None
        },
        min_paying,
    };
    let mut seq = vec![inst.root()];
    let mut visited = VertexSet::new(inst.n());
    visited.toggle(inst.root());
    s.dfs(&mut seq, &mut visited, 0, Rational::zero(), ElapsedDist::start())?;
    Ok((s.best, NonAdaptivePolicy::new(s.best_seq)))
}

/// Optimal non-adaptive policy by branch and bound over sequences, with
/// travel pruning, an optimistic reward bound and Pareto dominance on
/// (visited set, last vertex).
pub fn opt_nonadaptive(
    inst: &CorrKOInstance,
    caps: OracleCaps,
) -> Result<(Rational, NonAdaptivePolicy)> {
    caps.check(inst)?;
    search_nonadaptive(inst, None, caps.max_states)
}

/// Best non-adaptive policy among sequences whose `levels` strictly
/// decrease. No vertex or `W` cap applies; `max_states` bounds the search.
pub fn opt_nonadaptive_restricted(
    inst: &CorrKOInstance,
    levels: &[u32],
    max_states: usize,
) -> Result<(Rational, NonAdaptivePolicy)> {
    if levels.len() != inst.n() {
        return Err(CoreError::InvalidInstance("one level per vertex required".into()));
    }
    search_nonadaptive(inst, Some(levels), max_states)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapValue {
    Ratio(Rational),
    /// Positive adaptive optimum over a zero non-adaptive optimum.
    Infinite,
    /// Both optima are zero.
    Undefined,
}

impl fmt::Display for GapValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapValue::Ratio(r) => write!(f, "{r}"),
            GapValue::Infinite => f.write_str("inf"),
            GapValue::Undefined => f.write_str("undefined"),
        }
    }
}

pub fn gap_of(adaptive: &Rational, nonadaptive: &Rational) -> GapValue {
    if nonadaptive.is_positive() {
        GapValue::Ratio(adaptive / nonadaptive)
    } else if adaptive.is_positive() {
        GapValue::Infinite
    } else {
        GapValue::Undefined
    }
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub adaptive: Rational,
    pub nonadaptive: Rational,
    pub gap: GapValue,
}

pub fn adaptivity_gap(inst: &CorrKOInstance, caps: OracleCaps) -> Result<GapReport> {
    let (adaptive, _) = opt_adaptive(inst, caps)?;
    let (nonadaptive, _) = opt_nonadaptive(inst, caps)?;
    let gap = gap_of(&adaptive, &nonadaptive);
    Ok(GapReport {
        adaptive,
        nonadaptive,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversarial::{gen_random, gen_2point};
    use crate::dist::{Atom, JointDistribution};
    use crate::metric::FiniteMetric;
    use crate::policy::{eval_adaptive_exact, eval_nonadaptive_exact};
    use crate::rational::{int, ratio};

    #[test]
    fn zero_rewards_give_zero() {
        let inst = gen_random(5, 4, 6, 2, 3).unwrap();
        let zeroed = inst
            .with_dists(inst.dists().iter().map(|d| d.map_rewards(|_| int(0))).collect())
            .unwrap();
        assert_eq!(opt_adaptive(&zeroed, OracleCaps::default()).unwrap().0, int(0));
        assert_eq!(opt_nonadaptive(&zeroed, OracleCaps::default()).unwrap().0, int(0));
        let g = adaptivity_gap(&zeroed, OracleCaps::default()).unwrap();
        assert_eq!(g.gap, GapValue::Undefined);
    }

    #[test]
    fn single_reachable_vertex() {
        let inst = CorrKOInstance::new(
            FiniteMetric::new(vec![vec![0, 2], vec![2, 0]], 0).unwrap(),
            2,
            BigUint::from(3u32),
            vec![JointDistribution::zero(), JointDistribution::point(3u32, int(7))],
        )
        .unwrap();
        let (v, tree) = opt_adaptive(&inst, OracleCaps::default()).unwrap();
        assert_eq!(v, int(7));
        assert_eq!(eval_adaptive_exact(&inst, &tree).unwrap(), int(7));
    }

    #[test]
    fn adaptivity_helps_on_a_small_case() {
        // Vertex 1 sits at the root and is either quick or slow. Vertices 2
        // and 3 lie on opposite sides, so only one of them is reachable, and
        // the better one depends on how long vertex 1 took.
        let metric = FiniteMetric::new(
            vec![vec![0, 0, 1, 1], vec![0, 0, 1, 1], vec![1, 1, 0, 2], vec![1, 1, 2, 0]],
            0,
        )
        .unwrap();
        let inst = CorrKOInstance::new(
            metric,
            1,
            BigUint::from(4u32),
            vec![
                JointDistribution::zero(),
                JointDistribution::new(vec![
                    Atom::new(0u32, int(1), ratio(1, 2)),
                    Atom::new(4u32, int(1), ratio(1, 2)),
                ])
                .unwrap(),
                JointDistribution::point(4u32, int(4)),
                JointDistribution::point(0u32, int(3)),
            ],
        )
        .unwrap();
        let caps = OracleCaps::default();
        let (a, tree) = opt_adaptive(&inst, caps).unwrap();
        let (na, pol) = opt_nonadaptive(&inst, caps).unwrap();
        assert_eq!(a, eval_adaptive_exact(&inst, &tree).unwrap());
        assert_eq!(na, eval_nonadaptive_exact(&inst, &pol).unwrap());
        assert_eq!(a, ratio(9, 2));
        assert_eq!(na, int(4));
        assert_eq!(gap_of(&a, &na), GapValue::Ratio(ratio(9, 8)));
    }

    #[test]
    fn two_point_instances_have_no_gap() {
        for seed in 0..10 {
            let inst = gen_2point(5, 6, 8, seed).unwrap();
            let g = adaptivity_gap(&inst, OracleCaps::default()).unwrap();
            assert_eq!(g.adaptive, g.nonadaptive, "seed {seed}");
        }
    }

    #[test]
    fn caps_are_enforced() {
        let inst = gen_random(9, 4, 6, 2, 3).unwrap();
        assert!(matches!(
            opt_adaptive(&inst, OracleCaps::default()),
            Err(CoreError::CapExceeded { cap: "max_vertices", .. })
        ));
        let tight = OracleCaps {
            max_vertices: 16,
            max_w: 64,
            max_states: 5,
        };
        assert!(matches!(
            opt_nonadaptive(&inst, tight),
            Err(CoreError::CapExceeded { cap: "max_states", .. })
        ));
    }
}
