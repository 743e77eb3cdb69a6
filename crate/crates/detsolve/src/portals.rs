//! Portal-based OrientKD: extract portals from a known path, then rebuild a
//! path segment by segment with point-to-point knapsack orienteering.

use std::collections::BTreeSet;

use corrko_core::rational::{int, max_rat, pow_rat, ratio};
use corrko_core::Rational;
use num::traits::{One, Zero};

use crate::check::check_orientkd;
use crate::error::{DetError, Result};
use crate::instance::{KnapOrientInstance, OrientKdInstance, Path, Solution, Terminals};
use crate::lagrangian::KnapOrientSolver;

pub fn default_zeta() -> Rational {
    ratio(3, 2)
}

fn check_zeta(zeta: &Rational) -> Result<()> {
    if zeta < &Rational::one() || zeta * zeta > zeta + Rational::one() {
        return Err(DetError::BadPortals("zeta must satisfy 1 <= zeta and zeta^2 <= zeta + 1".into()));
    }
    Ok(())
}

/// `W_j = ceil(zeta^j) - 1`.
pub fn size_cap(zeta: &Rational, j: usize) -> Rational {
    Rational::from_integer(pow_rat(zeta, j as u64).ceil().to_integer()) - Rational::one()
}

/// `lb_j = sum_{h<j} max(zeta^h, wt(u_h))`.
pub fn lower_bound(zeta: &Rational, weights: &[Rational], portals: &[usize], j: usize) -> Rational {
    portals[..j]
        .iter()
        .enumerate()
        .map(|(h, &u)| max_rat(pow_rat(zeta, h as u64), weights[u].clone()))
        .sum()
}

/// Portals `u_0..u_k'` (with `u_{-1}` the root implicit) and per-segment
/// midpoints, regret exponents and length bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OkdPortalStructure {
    pub zeta: Rational,
    pub portals: Vec<usize>,
    pub midpoints: Vec<usize>,
    pub gammas: Vec<u32>,
    pub length_bounds: Vec<u64>,
    pub size_caps: Vec<Rational>,
    pub lower_bounds: Vec<Rational>,
    /// The witnessing subpaths `Q*_j` (from `u_{j-1}` to `u_j`) when the
    /// structure was extracted from a known path.
    pub segments: Option<Vec<Path>>,
}

impl OkdPortalStructure {
    pub fn trivial(zeta: Rational) -> Self {
        Self {
            zeta,
            portals: vec![],
            midpoints: vec![],
            gammas: vec![],
            length_bounds: vec![],
            size_caps: vec![],
            lower_bounds: vec![],
            segments: None,
        }
    }

    /// `k'`, or `None` for the trivial structure.
    pub fn k_prime(&self) -> Option<usize> {
        self.portals.len().checked_sub(1)
    }

    fn segment_start(&self, root: usize, j: usize) -> usize {
        if j == 0 {
            root
        } else {
            self.portals[j - 1]
        }
    }
}

fn length_bound(inst: &OrientKdInstance, a: usize, m: usize, b: usize, gamma: u32) -> u64 {
    (1u64 << gamma) - 1 + inst.metric.d(a, m) + inst.metric.d(m, b)
}

/// Builds a structure from explicit choices, filling in the derived bounds.
pub fn portal_structure(
    inst: &OrientKdInstance,
    zeta: Rational,
    portals: Vec<usize>,
    midpoints: Vec<usize>,
    gammas: Vec<u32>,
) -> Result<OkdPortalStructure> {
    check_zeta(&zeta)?;
    if midpoints.len() != portals.len() || gammas.len() != portals.len() {
        return Err(DetError::BadPortals("one midpoint and exponent per portal".into()));
    }
    let root = inst.root();
    let mut s = OkdPortalStructure::trivial(zeta);
    for j in 0..portals.len() {
        let a = if j == 0 { root } else { portals[j - 1] };
        s.length_bounds.push(length_bound(inst, a, midpoints[j], portals[j], gammas[j]));
        s.size_caps.push(size_cap(&s.zeta, j));
        s.lower_bounds.push(lower_bound(&s.zeta, &inst.weights, &portals, j));
    }
    s.portals = portals;
    s.midpoints = midpoints;
    s.gammas = gammas;
    Ok(s)
}

fn require_integer_weights(inst: &OrientKdInstance) -> Result<()> {
    if inst.weights.iter().any(|w| !w.is_integer()) {
        return Err(DetError::InvalidInstance("portal algorithm needs integer weights".into()));
    }
    Ok(())
}

fn regret(inst: &OrientKdInstance, path: &[usize]) -> u64 {
    let (a, b) = (path[0], path[path.len() - 1]);
    inst.metric.path_length(path).saturating_sub(inst.metric.d(a, b))
}

/// Extracts portals from a feasible rooted path: `u_j` is the first vertex
/// after `u_{j-1}` at which the segment weight (excluding `u_{j-1}`) reaches
/// `zeta^j`, and the path end closes the last segment. Each segment keeps
/// the half (around a reward-balancing midpoint) with the smaller regret.
pub fn extract_okd_portals(inst: &OrientKdInstance, path: &[usize], zeta: &Rational) -> Result<OkdPortalStructure> {
    check_zeta(zeta)?;
    let work = inst.normalized()?;
    require_integer_weights(&work)?;
    check_orientkd(inst, path).map_err(DetError::Infeasible)?;
    if path.len() == 1 {
        let mut s = OkdPortalStructure::trivial(zeta.clone());
        s.segments = Some(vec![]);
        return Ok(s);
    }
    let mut cuts = vec![0usize];
    let mut c = 0;
    loop {
        let thr = pow_rat(zeta, (cuts.len() - 1) as u64);
        let mut acc = Rational::zero();
        let mut found = None;
        for (i, &v) in path.iter().enumerate().skip(c + 1) {
            acc += &work.weights[v];
            if acc >= thr {
                found = Some(i);
                break;
            }
        }
        match found {
            Some(i) => {
                cuts.push(i);
                c = i;
            }
            None => break,
        }
    }
    if c != path.len() - 1 {
        cuts.push(path.len() - 1);
    }
    let mut portals = vec![];
    let mut midpoints = vec![];
    let mut gammas = vec![];
    let mut segments = vec![];
    for w in cuts.windows(2) {
        let seg = &path[w[0]..=w[1]];
        let last = seg.len() - 1;
        let total: Rational = seg[1..].iter().map(|&v| &work.rewards[v]).sum();
        let half = &total / int(2);
        let mut acc = Rational::zero();
        let mut t = 0;
        while acc < half {
            t += 1;
            acc += &work.rewards[seg[t]];
        }
        let (a, m, b) = (seg[0], seg[t], seg[last]);
        let reg = inst.metric.path_length(seg) - inst.metric.d(a, m) - inst.metric.d(m, b);
        let gamma = (reg + 1).ilog2();
        let q = if regret(inst, &seg[..=t]) <= regret(inst, &seg[t..]) {
            let mut q = seg[..=t].to_vec();
            if t != last {
                q.push(b);
            }
            q
        } else {
            let mut q = vec![a];
            q.extend_from_slice(&seg[t.max(1)..]);
            q
        };
        portals.push(b);
        midpoints.push(m);
        gammas.push(gamma);
        segments.push(q);
    }
    let mut s = portal_structure(&work, zeta.clone(), portals, midpoints, gammas)?;
    s.segments = Some(segments);
    verify_okd_portals(inst, &s)?;
    Ok(s)
}

/// Largest number of portals a portal structure can have: `1 + ceil(log_zeta W)`
/// with `W` the largest deadline.
pub fn max_k_prime(zeta: &Rational, max_deadline: &Rational) -> usize {
    let mut m = 0;
    let mut p = Rational::one();
    while &p < max_deadline {
        p *= zeta;
        m += 1;
    }
    1 + m
}

/// Checks the portal structure's distance, total-length, size, feasibility
/// and lower-bound properties (the last three need witnessing segments).
pub fn verify_okd_portals(inst: &OrientKdInstance, s: &OkdPortalStructure) -> Result<()> {
    let bad = |m: String| Err(DetError::BadPortals(m));
    check_zeta(&s.zeta)?;
    let work = inst.normalized()?;
    let root = work.root();
    let k = s.portals.len();
    if [s.midpoints.len(), s.gammas.len(), s.length_bounds.len(), s.size_caps.len(), s.lower_bounds.len()]
        .iter()
        .any(|&l| l != k)
    {
        return bad("per-portal vectors have mismatched lengths".into());
    }
    let mut seen = BTreeSet::from([root]);
    for &u in &s.portals {
        if u >= work.n() || !seen.insert(u) {
            return bad(format!("portal {u} repeated or out of range"));
        }
    }
    if let Some(kp) = s.k_prime() {
        let cap = max_k_prime(&s.zeta, &work.max_deadline());
        if kp > cap {
            return bad(format!("k' = {kp} exceeds {cap}"));
        }
    }
    let total: u64 = s.length_bounds.iter().sum();
    if total > work.length_budget {
        return bad(format!("sum of length bounds {total} exceeds {}", work.length_budget));
    }
    for j in 0..k {
        let a = s.segment_start(root, j);
        if s.length_bounds[j] != length_bound(&work, a, s.midpoints[j], s.portals[j], s.gammas[j])
            || s.size_caps[j] != size_cap(&s.zeta, j)
            || s.lower_bounds[j] != lower_bound(&s.zeta, &work.weights, &s.portals, j)
        {
            return bad(format!("derived bounds of segment {j} are inconsistent"));
        }
    }
    let Some(segments) = &s.segments else {
        return Ok(());
    };
    if segments.len() != k {
        return bad("one segment per portal required".into());
    }
    let mut whole = vec![root];
    for (j, q) in segments.iter().enumerate() {
        let a = s.segment_start(root, j);
        if q.first() != Some(&a) || q.last() != Some(&s.portals[j]) {
            return bad(format!("segment {j} does not join its portals"));
        }
        let len = work.metric.path_length(q);
        if len > s.length_bounds[j] {
            return bad(format!("segment {j} has length {len} above D_j = {}", s.length_bounds[j]));
        }
        let interior: Rational = q[1..q.len() - 1].iter().map(|&v| &work.weights[v]).sum();
        if interior > s.size_caps[j] {
            return bad(format!("segment {j} interior weight above W_j"));
        }
        for &v in &q[1..] {
            if work.deadlines[v] < &s.lower_bounds[j] + &work.weights[v] {
                return bad(format!("vertex {v} of segment {j} violates the lower-bound property"));
            }
        }
        whole.extend_from_slice(&q[1..]);
    }
    check_orientkd(&work, &whole).map_err(|v| DetError::BadPortals(format!("concatenated segments infeasible: {v}")))?;
    Ok(())
}

/// `sum_j rewd(Q*_j - u_{j-1})` for an extracted structure.
pub fn segment_reward(inst: &OrientKdInstance, s: &OkdPortalStructure) -> Rational {
    s.segments
        .iter()
        .flatten()
        .flat_map(|q| q[1..].iter())
        .map(|&v| &inst.rewards[v])
        .sum()
}

#[derive(Debug, Clone)]
pub struct PortalRun {
    pub best: Solution,
    /// The per-segment paths `Q^j` after shortcutting.
    pub q_paths: Vec<Path>,
    /// `Z^0, Z^1, Z^2` with their feasibility.
    pub z_paths: Vec<(Solution, bool)>,
    /// The path through the portals alone, with its feasibility.
    pub portal_path: (Solution, bool),
    /// Reward of the union of all `Q^j`.
    pub union_reward: Rational,
}

pub fn orientkd_portal_alg(
    inst: &OrientKdInstance,
    s: &OkdPortalStructure,
    p2p: &dyn KnapOrientSolver,
) -> Result<PortalRun> {
    verify_okd_portals(inst, s)?;
    run_portals(inst, s, p2p)
}

fn run_portals(inst: &OrientKdInstance, s: &OkdPortalStructure, p2p: &dyn KnapOrientSolver) -> Result<PortalRun> {
    let work = inst.normalized()?;
    require_integer_weights(&work)?;
    let root = work.root();
    let n = work.n();
    let mut used = vec![false; n];
    used[root] = true;
    let mut q_paths = vec![];
    for j in 0..s.portals.len() {
        let (a, b) = (s.segment_start(root, j), s.portals[j]);
        let allowed: Vec<bool> = (0..n)
            .map(|v| !used[v] && work.usable(v) && work.deadlines[v] >= &s.lower_bounds[j] + &work.weights[v])
            .collect();
        let rewards = (0..n)
            .map(|v| if allowed[v] { work.rewards[v].clone() } else { Rational::zero() })
            .collect();
        let mut weights = work.weights.clone();
        weights[a] = Rational::zero();
        weights[b] = Rational::zero();
        let sub = KnapOrientInstance::new(
            work.metric.clone(),
            Terminals::p2p(a, b),
            s.length_bounds[j],
            rewards,
            weights,
            Some(s.size_caps[j].clone()),
        )?;
        let q = p2p.solve(&sub)?.path;
        let mut short = vec![a];
        short.extend(q[1..q.len() - 1].iter().copied().filter(|&v| allowed[v] && v != root));
        short.push(b);
        for &v in &short {
            used[v] = true;
        }
        q_paths.push(short);
    }
    let union_reward = (0..n).filter(|&v| used[v] && v != root).map(|v| &inst.rewards[v]).sum::<Rational>()
        + &inst.rewards[root];
    let judge = |path: Path| -> (Solution, bool) {
        let ok = check_orientkd(inst, &path).is_ok();
        (
            Solution {
                reward: inst.reward(&path),
                path,
            },
            ok,
        )
    };
    let z_paths: Vec<(Solution, bool)> = (0..3)
        .map(|l| {
            let mut z = vec![root];
            for (j, q) in q_paths.iter().enumerate().filter(|(j, _)| j % 3 == l) {
                let _ = j;
                z.extend_from_slice(&q[1..q.len() - 1]);
            }
            judge(z)
        })
        .collect();
    let mut through = vec![root];
    through.extend_from_slice(&s.portals);
    let portal_path = judge(through);
    let mut best = Solution {
        reward: inst.reward(&[root]),
        path: vec![root],
    };
    for (c, ok) in z_paths.iter().chain(std::iter::once(&portal_path)) {
        if *ok && c.reward > best.reward {
            best = c.clone();
        }
    }
    Ok(PortalRun {
        best,
        q_paths,
        z_paths,
        portal_path,
        union_reward,
    })
}

/// Largest instance the exhaustive portal enumeration accepts.
pub const ENUM_MAX_VERTICES: usize = 6;
pub const ENUM_MAX_K_PRIME: usize = 2;

/// Runs the portal algorithm on every structure with `k' <= max_k_prime`
/// (portal sequences, midpoints and regret exponents) whose length bounds
/// fit the budget, and returns the best feasible output.
pub fn orientkd_portal_enumerate(
    inst: &OrientKdInstance,
    zeta: &Rational,
    p2p: &dyn KnapOrientSolver,
    max_k_prime: usize,
) -> Result<Solution> {
    check_zeta(zeta)?;
    if inst.n() > ENUM_MAX_VERTICES || max_k_prime > ENUM_MAX_K_PRIME {
        return Err(DetError::TooLarge {
            n: inst.n(),
            cap: ENUM_MAX_VERTICES,
        });
    }
    let work = inst.normalized()?;
    require_integer_weights(&work)?;
    let root = work.root();
    let budget = work.length_budget;
    let max_gamma = (budget + 1).ilog2();
    // Distinct (bound, midpoint, exponent) choices per ordered pair.
    let options = |a: usize, b: usize| -> Vec<(u64, usize, u32)> {
        let mut seen = BTreeSet::new();
        let mut out = vec![];
        for m in 0..work.n() {
            for g in 0..=max_gamma {
                let d = length_bound(&work, a, m, b, g);
                if d <= budget && seen.insert(d) {
                    out.push((d, m, g));
                }
            }
        }
        out
    };
    let mut best = Solution {
        reward: inst.reward(&[root]),
        path: vec![root],
    };
    let candidates: Vec<usize> = (0..work.n()).filter(|&v| v != root && work.usable(v)).collect();
    let mut stack: Vec<(Vec<usize>, Vec<usize>, Vec<u32>, u64)> = vec![(vec![], vec![], vec![], 0)];
    while let Some((portals, mids, gammas, used)) = stack.pop() {
        if !portals.is_empty() {
            let s = portal_structure(&work, zeta.clone(), portals.clone(), mids.clone(), gammas.clone())?;
            match run_portals(inst, &s, p2p) {
                Ok(run) if run.best.reward > best.reward => best = run.best,
                Ok(_) | Err(DetError::NoFeasiblePath) => {}
                Err(e) => return Err(e),
            }
        }
        if portals.len() > max_k_prime {
            continue;
        }
        let a = portals.last().copied().unwrap_or(root);
        for &b in candidates.iter().rev() {
            if portals.contains(&b) {
                continue;
            }
            for &(d, m, g) in options(a, b).iter().rev() {
                if used + d > budget {
                    continue;
                }
                let mut p = portals.clone();
                p.push(b);
                let mut ms = mids.clone();
                ms.push(m);
                let mut gs = gammas.clone();
                gs.push(g);
                stack.push((p, ms, gs, used + d));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::orientkd_exact;
    use crate::lagrangian::ExactKnapOrient;
    use corrko_core::FiniteMetric;

    fn chain() -> OrientKdInstance {
        // Five vertices on a line at unit spacing.
        let d = (0..5).map(|i: i64| (0..5).map(|j: i64| (i - j).unsigned_abs()).collect()).collect();
        OrientKdInstance::new(
            FiniteMetric::new(d, 0).unwrap(),
            Terminals::rooted(0),
            4,
            vec![int(0), int(1), int(2), int(3), int(4)],
            vec![int(0), int(1), int(1), int(2), int(1)],
            vec![int(0), int(5), int(5), int(5), int(5)],
        )
        .unwrap()
    }

    #[test]
    fn zeta_bounds() {
        assert!(check_zeta(&default_zeta()).is_ok());
        assert!(check_zeta(&int(2)).is_err());
        assert_eq!(size_cap(&default_zeta(), 0), int(0));
        assert_eq!(size_cap(&default_zeta(), 2), int(2));
        assert_eq!(size_cap(&default_zeta(), 3), int(3));
    }

    #[test]
    fn trivial_path_gives_trivial_structure() {
        let s = extract_okd_portals(&chain(), &[0], &default_zeta()).unwrap();
        assert_eq!(s.k_prime(), None);
        let run = orientkd_portal_alg(&chain(), &s, &ExactKnapOrient).unwrap();
        assert_eq!(run.best.path, vec![0]);
    }

    #[test]
    fn extraction_on_a_line() {
        let inst = chain();
        let opt = orientkd_exact(&inst).unwrap();
        assert_eq!(opt.path, vec![0, 1, 2, 3, 4]);
        let s = extract_okd_portals(&inst, &opt.path, &default_zeta()).unwrap();
        // Thresholds 1, 3/2, 9/4: cuts after 1, after {2,3}, then the end.
        assert_eq!(s.portals, vec![1, 3, 4]);
        assert!(s.length_bounds.iter().sum::<u64>() <= inst.length_budget);
        assert!(segment_reward(&inst, &s) * int(2) >= opt.reward);
        let run = orientkd_portal_alg(&inst, &s, &ExactKnapOrient).unwrap();
        assert!(run.z_paths.iter().all(|(_, ok)| *ok));
        assert!(run.best.reward * int(8) >= opt.reward);
        let covered: Rational = run.z_paths.iter().map(|(z, _)| z.reward.clone()).sum::<Rational>() + &run.portal_path.0.reward;
        assert!(covered >= run.union_reward);
    }

    #[test]
    fn tampered_structures_are_rejected() {
        let inst = chain();
        let mut s = extract_okd_portals(&inst, &[0, 1, 2, 3, 4], &default_zeta()).unwrap();
        s.length_bounds[0] += 10;
        assert!(matches!(verify_okd_portals(&inst, &s), Err(DetError::BadPortals(_))));
    }

    #[test]
    fn enumeration_matches_small_optimum_within_factor() {
        let inst = chain();
        let opt = orientkd_exact(&inst).unwrap();
        let e = orientkd_portal_enumerate(&inst, &default_zeta(), &ExactKnapOrient, 2).unwrap();
        assert!(check_orientkd(&inst, &e.path).is_ok());
        assert!(e.reward * int(8) >= opt.reward);
    }
}
