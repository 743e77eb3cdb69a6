//! Portal structure extracted from an adaptive decision tree: the path `Q*`,
//! the scale vertices `φ_j`, the greedy portal sets `Por_j`, and per-pair
//! midpoints and length bounds. Every guaranteed inequality is checked in
//! exact arithmetic before the structure is returned.

use corrko_core::policy::eval_adaptive_exact;
use corrko_core::rational::{from_u64, pow2, pow2_rat, Rational};
use corrko_core::{truncated_mean, AdaptivePolicyTree, CorrKOInstance};
use corrko_detsolve::Path;
use num::bigint::BigUint;
use num::traits::Zero;

use crate::error::{property, CskoError, Result};
use crate::params::StructuralParams;

/// A consecutive portal pair `(a, next(a))` of `Por_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortalPair {
    pub level: u64,
    pub a: usize,
    pub b: usize,
    pub midpoint: usize,
    pub gamma: u64,
    /// `D_a = 2^γ - 1 + d(a, m) + d(m, b)`.
    pub bound: u64,
    /// The witness `a`-`b` path `Q*_{a,b}`.
    pub path: Path,
}

#[derive(Debug, Clone)]
pub struct PortalStructure {
    pub params: StructuralParams,
    /// Vertices of `Q*`, root first, and their elapsed sizes in the tree.
    pub q_star: Path,
    pub elapsed: Vec<BigUint>,
    /// Positions on `Q*` of `φ_0, ..., φ_k`.
    pub phi_pos: Vec<usize>,
    /// `Por_j` as positions on `Q*`.
    pub por_pos: Vec<Vec<usize>>,
    pub pairs: Vec<PortalPair>,
    pub checks: StructureChecks,
}

impl PortalStructure {
    pub fn k(&self) -> u64 {
        self.phi_pos.len() as u64 - 1
    }

    pub fn phi(&self) -> Vec<usize> {
        self.phi_pos.iter().map(|&p| self.q_star[p]).collect()
    }

    pub fn por(&self, j: usize) -> Vec<usize> {
        self.por_pos[j].iter().map(|&p| self.q_star[p]).collect()
    }
}

/// The quantities the guarantees bound, computed exactly.
#[derive(Debug, Clone, Default)]
pub struct StructureChecks {
    pub opt: Rational,
    /// `Σ_{v∈σ} π_v(i_v)`, at least `OPT/2`.
    pub path_reward: Rational,
    /// `Σ_j Σ_{segment j} π_v(2^j - 1)`, at least `OPT/4`.
    pub segment_reward: Rational,
    /// `μ^j(Q*_{ρ,φ_j} - φ_j)` per level, at most `(K+1)2^j`.
    pub prefix_mu: Vec<Rational>,
    /// Portal-path reward, at least `OPT/8`.
    pub portal_reward: Rational,
    /// Per-level portal prefix sums, at most `(K+1)2^j`.
    pub portal_prefix: Vec<Rational>,
    pub total_bound: u64,
}

fn mu_sum(inst: &CorrKOInstance, vs: &[usize], j: u64) -> Rational {
    vs.iter().map(|&v| truncated_mean(inst.dist(v), j)).sum()
}

fn level_reward(inst: &CorrKOInstance, vs: &[usize], j: u64) -> Rational {
    let t = pow2(j) - 1u32;
    vs.iter().map(|&v| inst.pi(v, &t)).sum()
}

fn path_len(inst: &CorrKOInstance, p: &[usize]) -> u64 {
    inst.metric().path_length(p)
}

/// The largest single-vertex start reward `π_v(0)` over reachable vertices,
/// with the vertex.
pub fn best_single_vertex(inst: &CorrKOInstance) -> Option<(usize, Rational)> {
    let zero = BigUint::zero();
    inst.non_root()
        .filter(|&v| inst.d(inst.root(), v) <= inst.b())
        .map(|v| (v, inst.pi(v, &zero)))
        .fold(None, |best: Option<(usize, Rational)>, (v, r)| match best {
            Some((_, ref b)) if *b >= r => best,
            _ => Some((v, r)),
        })
}

/// Whether every reachable vertex has `π_v(0) ≤ opt/4`.
pub fn passes_single_vertex_filter(inst: &CorrKOInstance, opt: &Rational) -> bool {
    best_single_vertex(inst).is_none_or(|(_, r)| r * from_u64(4) <= *opt)
}

/// Nodes of `T'`: no ancestor-or-self satisfies, for some level `j ≤ L`,
/// `Σ_{w≺u} X^j_w ≤ 2^{j+1}` together with `Σ_{w≺u} μ^j_w > K 2^j`.
fn truncated_tree(inst: &CorrKOInstance, tree: &AdaptivePolicyTree, params: &StructuralParams) -> Vec<bool> {
    let levels = params.l as usize + 1;
    let nodes = tree.nodes();
    let mut x_sum: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); levels]; nodes.len()];
    let mut mu: Vec<Vec<Rational>> = vec![vec![Rational::zero(); levels]; nodes.len()];
    let mut keep = vec![false; nodes.len()];
    // Parents precede children in the node order.
    for (id, node) in nodes.iter().enumerate() {
        let parent_kept = match node.parent {
            None => true,
            Some((p, atom)) => {
                let pv = nodes[p].vertex;
                let size = &inst.dist(pv).atoms()[atom].size;
                for j in 0..levels {
                    let cap = pow2(j as u64);
                    x_sum[id][j] = &x_sum[p][j] + size.min(&cap);
                    mu[id][j] = &mu[p][j] + truncated_mean(inst.dist(pv), j as u64);
                }
                keep[p]
            }
        };
        let in_a = (0..levels).any(|j| {
            x_sum[id][j] <= pow2(j as u64 + 1) && mu[id][j] > from_u64(params.k) * pow2_rat(j as u64)
        });
        keep[id] = parent_kept && !in_a;
    }
    keep
}

/// Greedy split of segment positions `[start, end)` into pieces of
/// `μ^j`-weight at least `2^j`; returns the portal positions ending with `end`.
fn greedy_portals(mu: &[Rational], start: usize, end: usize, j: u64) -> Vec<usize> {
    let cap = pow2_rat(j);
    let mut por = vec![];
    let mut seg = start;
    let mut acc = Rational::zero();
    for (p, m) in mu.iter().enumerate().take(end).skip(start) {
        acc += m;
        if acc >= cap {
            por.push(seg);
            por.push(p);
            seg = p + 1;
            acc = Rational::zero();
        }
    }
    if seg < end {
        por.push(seg);
    }
    por.push(end);
    por.dedup();
    por
}

fn build_pair(inst: &CorrKOInstance, q: &[usize], a: usize, b: usize, j: u64) -> PortalPair {
    let t = pow2(j) - 1u32;
    let rewards: Vec<Rational> = (a..b).map(|p| inst.pi(q[p], &t)).collect();
    let total: Rational = rewards.iter().sum();
    let mut prefix = Rational::zero();
    let mut m = b - 1;
    for (i, r) in rewards.iter().enumerate() {
        prefix += r;
        if from_u64(2) * &prefix >= total {
            m = a + i;
            break;
        }
    }
    let (va, vm, vb) = (q[a], q[m], q[b]);
    let reg_left = path_len(inst, &q[a..=m]) - inst.d(va, vm);
    let reg_right = path_len(inst, &q[m..=b]) - inst.d(vm, vb);
    let gamma = u64::from((reg_left + reg_right + 1).ilog2());
    let bound = (1u64 << gamma) - 1 + inst.d(va, vm) + inst.d(vm, vb);
    let path = if reg_left <= reg_right {
        let mut p = q[a..=m].to_vec();
        p.push(vb);
        p
    } else {
        let mut p = vec![va];
        p.extend_from_slice(&q[m..=b]);
        p.dedup();
        p
    };
    PortalPair {
        level: j,
        a: va,
        b: vb,
        midpoint: vm,
        gamma,
        bound,
        path,
    }
}

/// Extracts the portal structure from `tree` and verifies it against the
/// tree's exact value.
pub fn extract_structure(inst: &CorrKOInstance, tree: &AdaptivePolicyTree) -> Result<PortalStructure> {
    let params = StructuralParams::new(inst.w());
    let opt = eval_adaptive_exact(inst, tree)?;
    if let Some((v, r)) = best_single_vertex(inst) {
        if r * from_u64(4) > opt {
            return Err(CskoError::SingleVertex { vertex: v });
        }
    }
    let keep = truncated_tree(inst, tree, &params);
    let nodes = tree.nodes();
    // Path sums of π_v(i_v); the best leaf of T' carries at least OPT/2.
    let mut sums = vec![Rational::zero(); nodes.len()];
    for (id, node) in nodes.iter().enumerate() {
        let own = inst.pi(node.vertex, &node.elapsed);
        sums[id] = match node.parent {
            Some((p, _)) => &sums[p] + own,
            None => own,
        };
    }
    let is_leaf = |id: usize| nodes[id].children.iter().all(|c| c.is_none_or(|c| !keep[c]));
    let s = (0..nodes.len())
        .filter(|&id| keep[id] && is_leaf(id))
        .fold(None, |best: Option<usize>, id| match best {
            Some(b) if sums[b] >= sums[id] => Some(b),
            _ => Some(id),
        })
        .ok_or_else(|| property("pathlem", "root node is excluded from T'"))?;
    let ids = tree.path_to(s);
    let q: Path = ids.iter().map(|&i| nodes[i].vertex).collect();
    let elapsed: Vec<BigUint> = ids.iter().map(|&i| nodes[i].elapsed.clone()).collect();
    let path_reward = sums[s].clone();

    let mut phi_pos = vec![];
    loop {
        let j = phi_pos.len() as u64;
        let cut = pow2(j + 1) - 1u32;
        match elapsed.iter().position(|e| *e >= cut) {
            Some(p) => phi_pos.push(p),
            None => {
                phi_pos.push(q.len() - 1);
                break;
            }
        }
    }
    let k = phi_pos.len() as u64 - 1;

    let mut segment_reward = Rational::zero();
    let mut prefix_mu = vec![];
    let mut por_pos = vec![];
    let mut pairs = vec![];
    for j in 0..=k {
        let start = if j == 0 { 0 } else { phi_pos[j as usize - 1] };
        let end = phi_pos[j as usize];
        segment_reward += level_reward(inst, &q[start..end], j);
        prefix_mu.push(mu_sum(inst, &q[..end], j));
        let mu: Vec<Rational> = q.iter().map(|&v| truncated_mean(inst.dist(v), j)).collect();
        let por = greedy_portals(&mu, start, end, j);
        for w in por.windows(2) {
            pairs.push(build_pair(inst, &q, w[0], w[1], j));
        }
        por_pos.push(por);
    }

    let mut ps = PortalStructure {
        params,
        q_star: q,
        elapsed,
        phi_pos,
        por_pos,
        pairs,
        checks: StructureChecks {
            opt,
            path_reward,
            segment_reward,
            prefix_mu,
            ..Default::default()
        },
    };
    verify_structure(inst, &mut ps)?;
    Ok(ps)
}

/// `Σ_{h ≤ j} μ^j(Q_{a,b} - b)` over the pairs of levels up to `j`.
pub fn pair_prefix_sum(inst: &CorrKOInstance, pairs: &[PortalPair], j: u64) -> Rational {
    pairs
        .iter()
        .filter(|p| p.level <= j)
        .map(|p| mu_sum(inst, &p.path[..p.path.len() - 1], j))
        .sum()
}

/// Re-checks every structural guarantee, filling in the portal quantities.
pub fn verify_structure(inst: &CorrKOInstance, ps: &mut PortalStructure) -> Result<()> {
    let opt = ps.checks.opt.clone();
    let params = ps.params;
    let k = ps.k();
    let c = &mut ps.checks;
    if c.path_reward.clone() * from_u64(2) < opt {
        return Err(property("pathlem(a)", format!("{} < OPT/2 = {}", c.path_reward, &opt / from_u64(2))));
    }
    if c.segment_reward.clone() * from_u64(4) < opt {
        return Err(property("(a)", format!("segment reward {} < OPT/4", c.segment_reward)));
    }
    for (j, m) in c.prefix_mu.iter().enumerate() {
        if *m > params.prefix_cap(j as u64) {
            return Err(property("(b)", format!("level {j}: {m}")));
        }
    }
    if path_len(inst, &ps.q_star) > inst.b() {
        return Err(property("Q* length", format!("{}", path_len(inst, &ps.q_star))));
    }
    for (j, por) in ps.por_pos.iter().enumerate() {
        if por.len() as u64 > params.n1 {
            return Err(property("|Por_j|", format!("level {j}: {} > {}", por.len(), params.n1)));
        }
    }
    let mut reward = Rational::zero();
    let mut total = 0u64;
    for pair in &ps.pairs {
        let len = path_len(inst, &pair.path);
        if len > pair.bound {
            return Err(property("P1", format!("{}->{}: {len} > {}", pair.a, pair.b, pair.bound)));
        }
        total += pair.bound;
        let body = &pair.path[..pair.path.len() - 1];
        reward += level_reward(inst, body, pair.level);
        let size = mu_sum(inst, body, pair.level);
        if size > pow2_rat(pair.level) {
            return Err(property("P5", format!("{}->{}: {size}", pair.a, pair.b)));
        }
    }
    if total > inst.b() {
        return Err(property("P2", format!("{total} > {}", inst.b())));
    }
    if reward.clone() * from_u64(8) < opt {
        return Err(property("P3", format!("{reward} < OPT/8")));
    }
    c.portal_prefix = (0..=k).map(|j| pair_prefix_sum(inst, &ps.pairs, j)).collect();
    for (j, m) in c.portal_prefix.iter().enumerate() {
        if *m > params.prefix_cap(j as u64) {
            return Err(property("P4", format!("level {j}: {m}")));
        }
    }
    c.portal_reward = reward;
    c.total_bound = total;
    Ok(())
}

/// `D` values fit comfortably in `u64`; this reports the largest exponent.
pub fn max_gamma(ps: &PortalStructure) -> u64 {
    ps.pairs.iter().map(|p| p.gamma).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::policy::NonAdaptivePolicy;
    use corrko_core::rational::{int, ratio};
    use corrko_core::{Atom, FiniteMetric, JointDistribution};

    fn mus(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn greedy_split_closes_pieces_at_the_cap() {
        // Level 1: cap 2. Pieces [0,1] (weight 2), [2] (weight 3), tail [3,4].
        let mu = mus(&[1, 1, 3, 0, 1, 0]);
        assert_eq!(greedy_portals(&mu, 0, 5, 1), vec![0, 1, 2, 3, 5]);
        assert_eq!(greedy_portals(&mu, 2, 2, 1), vec![2]);
        // No tail: the last piece ends right before the end position.
        assert_eq!(greedy_portals(&mu, 2, 3, 1), vec![2, 3]);
    }

    #[test]
    fn midpoint_balances_reward_and_picks_the_cheaper_detour() {
        let d = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 1, 2],
            vec![2, 1, 0, 1],
            vec![3, 2, 1, 0],
        ];
        let metric = FiniteMetric::new(d, 0).unwrap();
        let dists = vec![
            JointDistribution::zero(),
            JointDistribution::point(0u32, int(1)),
            JointDistribution::point(0u32, int(1)),
            JointDistribution::point(0u32, int(1)),
        ];
        let inst = CorrKOInstance::new(metric, 10, BigUint::from(2u32), dists).unwrap();
        let q = [0, 2, 1, 3];
        let pair = build_pair(&inst, &q, 0, 3, 0);
        // Rewards 0,1,1: half of 2 is reached at position 1 (vertex 2).
        assert_eq!(pair.midpoint, 2);
        // Left regret 0, right regret d(2,1)+d(1,3)-d(2,3) = 2.
        assert_eq!(pair.gamma, 1);
        assert_eq!(pair.bound, 1 + 2 + 1);
        assert_eq!(pair.path, vec![0, 2, 3]);
    }

    #[test]
    fn chain_tree_yields_a_subsequence() {
        let coin = |s: u32| {
            JointDistribution::new(vec![
                Atom::new(s, int(1), ratio(1, 2)),
                Atom::new(0u32, int(1), ratio(1, 2)),
            ])
            .unwrap()
        };
        let mut dists = vec![JointDistribution::zero()];
        dists.extend([1, 2, 1, 3, 1, 1, 2, 1].map(coin));
        let inst = CorrKOInstance::new(FiniteMetric::single_location(9), 0, BigUint::from(4u32), dists).unwrap();
        let chain = NonAdaptivePolicy::new((0..9).collect());
        let tree = AdaptivePolicyTree::from_chain(&inst, &chain).unwrap();
        let ps = extract_structure(&inst, &tree).unwrap();
        let mut it = chain.sequence.iter();
        assert!(ps.q_star.iter().all(|v| it.any(|w| w == v)));
        assert!(ps.checks.portal_reward.clone() * int(8) >= ps.checks.opt);
        assert_eq!(*ps.por_pos.last().unwrap().last().unwrap(), ps.q_star.len() - 1);
    }

    #[test]
    fn heavy_single_vertex_is_reported() {
        let dists = vec![JointDistribution::zero(), JointDistribution::point(1u32, int(10))];
        let inst = CorrKOInstance::new(FiniteMetric::single_location(2), 0, BigUint::from(2u32), dists).unwrap();
        let tree = AdaptivePolicyTree::from_chain(&inst, &NonAdaptivePolicy::new(vec![0, 1])).unwrap();
        assert!(matches!(extract_structure(&inst, &tree), Err(CskoError::SingleVertex { vertex: 1 })));
    }
}
