//! The polynomial-time `O(log W)` algorithm: one knapsack-orienteering
//! instance per scale `2^j`, rounded and thinned at rate 1/4.

use corrko_core::policy::{thinned_best_subset, thinned_value_exact};
use corrko_core::rational::{pow2, pow2_rat, ratio, Rational};
use corrko_core::{truncated_mean, AdaptivePolicyTree, CorrKOInstance};
use corrko_detsolve::{KnapOrientInstance, Path, Terminals};
use corrko_lp::KoLpPoint;
use num::bigint::BigUint;
use num::traits::Zero;

use crate::error::{CskoError, Result};
use crate::knap::{solve_knap, KnapSolver};
use crate::randomized::RandomizedPolicy;

/// Exact subset enumeration is used up to this many non-root vertices.
pub const MAX_THINNED_PATH: usize = 16;

/// Rooted knapsack orienteering at scale `j`: rewards `π_v(2^j - 1)`,
/// weights `μ^j_v = E[min(S_v, 2^j)]`, knapsack budget `2^{j+1}`.
pub fn level_instance(inst: &CorrKOInstance, j: u64) -> Result<KnapOrientInstance> {
    let start = pow2(j) - 1u32;
    let rewards = (0..inst.n()).map(|v| inst.pi(v, &start)).collect();
    let weights = inst.dists().iter().map(|d| truncated_mean(d, j)).collect();
    Ok(KnapOrientInstance::new(
        inst.metric().clone(),
        Terminals::rooted(inst.root()),
        inst.b(),
        rewards,
        weights,
        Some(pow2_rat(j + 1)),
    )?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PolyMode {
    /// Keep the thinned path as a randomized policy and report its exact
    /// expected value.
    #[default]
    Randomized,
    /// Replace the thinning by the best sub-sequence of the rounded path.
    Derandomized,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolyOptions {
    pub solver: KnapSolver,
    pub mode: PolyMode,
}

#[derive(Debug, Clone)]
pub struct LevelRun {
    pub j: u64,
    pub lp_value: Option<f64>,
    /// The rounded knapsack-orienteering path and its level reward.
    pub path: Path,
    pub path_reward: Rational,
    pub policy: RandomizedPolicy,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct PolyRun {
    pub levels: Vec<LevelRun>,
    pub best: usize,
}

impl PolyRun {
    pub fn policy(&self) -> &RandomizedPolicy {
        &self.levels[self.best].policy
    }

    pub fn value(&self) -> &Rational {
        &self.levels[self.best].value
    }

    /// Largest KO-LP optimum over the levels, when the LP was solved.
    pub fn max_lp_value(&self) -> Option<f64> {
        self.levels.iter().filter_map(|l| l.lp_value).reduce(f64::max)
    }
}

/// The thinning rate of the rounded path.
pub fn keep_prob() -> Rational {
    ratio(1, 4)
}

pub fn poly_logw(inst: &CorrKOInstance, opts: PolyOptions) -> Result<PolyRun> {
    let levels = corrko_core::rational::ceil_log2(inst.w());
    let mut runs = Vec::with_capacity(levels as usize + 1);
    for j in 0..=levels {
        let knap = level_instance(inst, j)?;
        let run = solve_knap(&knap, opts.solver)?;
        let path = run.solution.path;
        if path.len() - 1 > MAX_THINNED_PATH {
            return Err(CskoError::TooLarge {
                what: "rounded path",
                size: path.len() - 1,
                cap: MAX_THINNED_PATH,
            });
        }
        let (policy, value) = match opts.mode {
            PolyMode::Randomized => {
                let keep = keep_prob();
                let value = thinned_value_exact(inst, &path, &keep)?;
                (
                    RandomizedPolicy::Thinned {
                        path: path.clone(),
                        keep,
                    },
                    value,
                )
            }
            PolyMode::Derandomized => {
                let (value, pol) = thinned_best_subset(inst, &path)?;
                (RandomizedPolicy::Fixed(pol), value)
            }
        };
        runs.push(LevelRun {
            j,
            lp_value: run.lp_value,
            path,
            path_reward: run.solution.reward,
            policy,
            value,
        });
    }
    let best = (0..runs.len())
        .fold(0, |b, i| if runs[i].value > runs[b].value { i } else { b });
    Ok(PolyRun { levels: runs, best })
}

/// The fractional KO-LP point an adaptive tree induces at scale `j`.
#[derive(Debug, Clone)]
pub struct TreeLpPoint {
    /// Rooted paths through the tree nodes processed in `[2^j - 1, 2^{j+1} - 1)`,
    /// each weighted by the probability that execution leaves that window
    /// right after the path's last node.
    pub paths: Vec<(Rational, Path)>,
    pub point: KoLpPoint,
    /// `Σ reach(u) π_u(i_u)` over the window's nodes.
    pub window_reward: Rational,
}

pub fn tree_kolp_point(inst: &CorrKOInstance, tree: &AdaptivePolicyTree, j: u64) -> TreeLpPoint {
    let lo = pow2(j) - 1u32;
    let hi = pow2(j + 1) - 1u32;
    let in_window = |e: &BigUint| e >= &lo && e < &hi;
    let nodes = tree.nodes();
    let mut paths = vec![];
    let mut window_reward = Rational::zero();
    for (id, node) in nodes.iter().enumerate() {
        if !in_window(&node.elapsed) {
            continue;
        }
        window_reward += &node.reach * inst.pi(node.vertex, &node.elapsed);
        let atoms = inst.dist(node.vertex).atoms();
        let leave: Rational = atoms
            .iter()
            .zip(&node.children)
            .filter(|(_, c)| c.is_none_or(|c| !in_window(&nodes[c].elapsed)))
            .map(|(a, _)| &a.prob)
            .sum();
        if leave.is_zero() {
            continue;
        }
        let mut chain = vec![node.vertex];
        let mut cur = id;
        while let Some((p, _)) = nodes[cur].parent {
            if !in_window(&nodes[p].elapsed) {
                break;
            }
            chain.push(nodes[p].vertex);
            cur = p;
        }
        if *chain.last().expect("non-empty") != inst.root() {
            chain.push(inst.root());
        }
        chain.reverse();
        paths.push((&node.reach * leave, chain));
    }
    let weighted: Vec<(f64, Path)> = paths
        .iter()
        .map(|(p, q)| (corrko_core::rational::to_f64(p), q.clone()))
        .collect();
    let point = KoLpPoint::from_paths(inst.metric(), &weighted);
    TreeLpPoint {
        paths,
        point,
        window_reward,
    }
}

/// `Σ_Q Pr[Q] Σ_{u∈Q} w_u`: a linear functional of the induced point,
/// evaluated exactly.
pub fn tree_point_total(point: &TreeLpPoint, weights: &[Rational]) -> Rational {
    point
        .paths
        .iter()
        .map(|(p, q)| p * q.iter().map(|&u| &weights[u]).sum::<Rational>())
        .sum()
}

/// Total probability mass of the induced paths.
pub fn tree_point_mass(point: &TreeLpPoint) -> Rational {
    point.paths.iter().map(|(p, _)| p.clone()).sum()
}
