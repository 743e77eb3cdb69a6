//! Correlated knapsack orienteering with cancellations.
//!
//! Large-outcome rewards are handled without cancelling (cancelling never
//! helps there). Small-outcome rewards go through the cancellation LP: its
//! optimum induces a knapsack-orienteering instance whose rounded path `Q`
//! carries the restricted single-path LP point, and that point is turned
//! into independent per-vertex thresholds.

use corrko_core::policy::{eval_cancellation_exact, CancellationPolicy, Threshold, ThresholdDist};
use corrko_core::rational::{from_f64, ratio, to_f64, Rational};
use corrko_core::{split_rewards, CorrKOInstance};
use corrko_detsolve::{ExactOrienteering, KnapOrientInstance, Path, Terminals};
use corrko_lp::ckoclp::{hazard, hazard_reward};
use corrko_lp::kolp::{kolp_value, kolp_violation};
use corrko_lp::{round_kolp, solve_ckoclp, solve_kolp, CkocLpSolution};
use num::bigint::BigUint;
use num::traits::{One, Zero};

use crate::error::{CskoError, Result};
use crate::polylogw::{poly_logw, PolyOptions, PolyRun};
use crate::randomized::RandomizedPolicy;

/// `z̄_{u,0}` below this counts as "never visited".
const VISIT_EPS: f64 = 1e-12;
/// Largest number of threshold vectors one search may evaluate.
pub const MAX_THRESHOLD_VECTORS: usize = 100_000;
/// Largest number of visiting orders the brute force may try.
pub const MAX_SEQUENCES: usize = 10_000;

/// The knapsack-orienteering instance induced by a cancellation-LP optimum:
/// `wt_u = Σ_t t s̄_{u,t} / z̄_{u,0}`, `π̂_u = Σ_t z̄_{u,t} hr_{u,t} / z̄_{u,0}`,
/// knapsack budget `W`.
pub fn induced_knap_orient(inst: &CorrKOInstance, lp: &CkocLpSolution) -> Result<KnapOrientInstance> {
    let w = lp.layout.w;
    let mut rewards = vec![];
    let mut weights = vec![];
    for u in 0..inst.n() {
        let z0 = lp.zt[u][0];
        if u == inst.root() || z0 < VISIT_EPS {
            rewards.push(Rational::zero());
            weights.push(Rational::zero());
            continue;
        }
        let load = lp.expected_load(u) / z0;
        let reward: f64 = (0..=w)
            .map(|t| lp.zt[u][t as usize] * to_f64(&hazard_reward(inst.dist(u), t)))
            .sum::<f64>()
            / z0;
        weights.push(from_f64(load.max(0.0)));
        rewards.push(from_f64(reward.max(0.0)));
    }
    Ok(KnapOrientInstance::new(
        inst.metric().clone(),
        Terminals::rooted(inst.root()),
        inst.b(),
        rewards,
        weights,
        Some(Rational::from_integer(w.into())),
    )?)
}

/// The LP point restricted to one vertex and rescaled so that `z̃_0 = 1`.
/// A vertex the LP never visits gets the "stop at 0" point.
pub fn restrict_point(lp: &CkocLpSolution, u: usize) -> (Vec<f64>, Vec<f64>) {
    let z0 = lp.zt[u][0];
    let w = lp.layout.w as usize;
    if z0 < VISIT_EPS {
        let mut z = vec![0.0; w + 1];
        let mut s = vec![0.0; w + 1];
        z[0] = 1.0;
        s[0] = 1.0;
        return (z, s);
    }
    (
        lp.zt[u].iter().map(|z| z / z0).collect(),
        lp.s[u].iter().map(|s| s / z0).collect(),
    )
}

/// Largest violation of the single-path LP at `(z̃, s̃)`: `z̃_t = s̃_t +
/// z̃_{t+1}`, `s̃_t ≥ h_t z̃_t`, `Σ_u Σ_t t s̃_{u,t} ≤ W`, `z̃_{u,0} = 1`,
/// non-negativity.
pub fn ck_violation(inst: &CorrKOInstance, verts: &[usize], zt: &[Vec<f64>], s: &[Vec<f64>], w: u64) -> f64 {
    let w = w as usize;
    let mut worst = 0.0f64;
    let mut load = 0.0;
    for (i, &u) in verts.iter().enumerate() {
        let (z, s) = (&zt[i], &s[i]);
        worst = worst.max((z[0] - 1.0).abs());
        for t in 0..=w {
            let next = if t < w { z[t + 1] } else { 0.0 };
            worst = worst.max((z[t] - s[t] - next).abs());
            worst = worst.max(to_f64(&hazard(inst.dist(u), t as u64)) * z[t] - s[t]);
            worst = worst.max(-z[t]).max(-s[t]);
            load += t as f64 * s[t];
        }
    }
    worst.max(load - w as f64)
}

/// Rounds to a multiple of `10^-6` so the threshold arithmetic stays small.
fn grid(x: f64) -> Rational {
    ratio((x.clamp(0.0, 1.0) * 1e6).round() as i64, 1_000_000)
}

/// Independent threshold `T` with `Pr[T = t | T ≥ t] = c_t`, where
/// `c_t = (s̃_t - h_t z̃_t) / (z̃_t (1 - h_t))`. Running `u` under `T` then
/// reproduces `(z̃, s̃)` whenever the point comes from some threshold. The
/// `t = 0` term is ignored: every vertex of `Q` is started.
pub fn hazard_thresholds(dist: &corrko_core::JointDistribution, z: &[f64], s: &[f64]) -> ThresholdDist {
    let mut out: ThresholdDist = vec![];
    let mut alive = Rational::one();
    for t in 1..z.len() {
        let h = to_f64(&hazard(dist, t as u64));
        if z[t] <= VISIT_EPS || h >= 1.0 {
            continue;
        }
        let c = grid((s[t] - h * z[t]) / (z[t] * (1.0 - h)));
        if c.is_zero() {
            continue;
        }
        out.push((Threshold::At(t as u64), &alive * &c));
        alive *= Rational::one() - c;
        if alive.is_zero() {
            return out;
        }
    }
    out.push((Threshold::Never, alive));
    out
}

/// Deterministic threshold choices worth trying for one vertex: `Never`
/// and every `At(t)` strictly below its largest size and within `W`.
fn threshold_options(inst: &CorrKOInstance, u: usize) -> Vec<Threshold> {
    let max = inst.dist(u).atoms().iter().map(|a| a.size.clone()).max().unwrap_or_default();
    let w = inst.w_u64().unwrap_or(u64::MAX);
    let mut out = vec![Threshold::Never];
    let mut t = 1u64;
    while BigUint::from(t) < max && t <= w {
        out.push(Threshold::At(t));
        t += 1;
    }
    out
}

/// Best deterministic threshold vector for a fixed visiting order.
pub fn search_thresholds(inst: &CorrKOInstance, seq: &[usize]) -> Result<(Rational, CancellationPolicy)> {
    let options: Vec<Vec<Threshold>> = seq.iter().skip(1).map(|&u| threshold_options(inst, u)).collect();
    let total = options.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len()));
    match total {
        Some(n) if n <= MAX_THRESHOLD_VECTORS => {}
        _ => {
            return Err(CskoError::TooLarge {
                what: "threshold search",
                size: total.unwrap_or(usize::MAX),
                cap: MAX_THRESHOLD_VECTORS,
            })
        }
    }
    let never = vec![(Threshold::Never, Rational::one())];
    let mut idx = vec![0usize; options.len()];
    let mut best: Option<(Rational, CancellationPolicy)> = None;
    loop {
        let mut thresholds = vec![never.clone()];
        thresholds.extend(idx.iter().zip(&options).map(|(&i, o)| vec![(o[i], Rational::one())]));
        let pol = CancellationPolicy {
            sequence: seq.to_vec(),
            thresholds,
        };
        let v = eval_cancellation_exact(inst, &pol)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, pol));
        }
        // Odometer step.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(best.expect("at least one vector"));
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Best non-adaptive cancellation policy: every travel-feasible sequence
/// with every deterministic threshold vector. Randomized thresholds cannot
/// do better since the value is linear in each vertex's threshold law.
pub fn brute_force_cancellation(inst: &CorrKOInstance) -> Result<(Rational, CancellationPolicy)> {
    fn go(
        inst: &CorrKOInstance,
        seq: &mut Vec<usize>,
        travel: u64,
        best: &mut (Rational, CancellationPolicy),
        budget: &mut usize,
    ) -> Result<()> {
        if *budget == 0 {
            return Err(CskoError::TooLarge {
                what: "sequence count for the cancellation brute force",
                size: MAX_SEQUENCES + 1,
                cap: MAX_SEQUENCES,
            });
        }
        *budget -= 1;
        let (v, pol) = search_thresholds(inst, seq)?;
        if v > best.0 {
            *best = (v, pol);
        }
        let cur = *seq.last().expect("non-empty");
        for u in inst.non_root() {
            let t = travel + inst.d(cur, u);
            if seq.contains(&u) || t > inst.b() {
                continue;
            }
            seq.push(u);
            go(inst, seq, t, best, budget)?;
            seq.pop();
        }
        Ok(())
    }
    let root_only = CancellationPolicy::without_cancellation(&corrko_core::NonAdaptivePolicy::root_only(inst));
    let mut best = (Rational::zero(), root_only);
    let mut budget = MAX_SEQUENCES;
    go(inst, &mut vec![inst.root()], 0, &mut best, &mut budget)?;
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct CancelBranch {
    pub lp: CkocLpSolution,
    pub knap: KnapOrientInstance,
    /// KO-LP objective of the induced point and its largest row violation.
    pub induced_value: f64,
    pub induced_violation: f64,
    /// KO-LP optimum of the induced instance.
    pub kolp_objective: f64,
    pub q: Path,
    /// `π̂(Q)`.
    pub q_reward: f64,
    /// Restricted `(z̃, s̃)` for each non-root vertex of `Q`, in order.
    pub zt: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub ck_violation: f64,
    /// LP-driven thresholds along `Q` and their value on the small part.
    pub policy: CancellationPolicy,
    pub value: Rational,
}

impl CancelBranch {
    /// The best deterministic thresholds along `Q`, on the small part.
    pub fn search(&self, small: &CorrKOInstance) -> Result<(Rational, CancellationPolicy)> {
        search_thresholds(small, &self.q)
    }
}

/// The cancellation branch on a small-reward instance (no reward above
/// `W/2`).
pub fn cancel_branch(small: &CorrKOInstance) -> Result<CancelBranch> {
    let lp = solve_ckoclp(small)?;
    let knap = induced_knap_orient(small, &lp)?;
    let induced_value = kolp_value(&knap, &lp.point);
    let induced_violation = kolp_violation(&knap, &lp.point);
    let ko = solve_kolp(&knap)?;
    let q = round_kolp(&knap, &ko, &ExactOrienteering)?.path;
    let verts: Vec<usize> = q[1..].to_vec();
    let (zt, s): (Vec<_>, Vec<_>) = verts.iter().map(|&u| restrict_point(&lp, u)).unzip();
    let ck_violation = ck_violation(small, &verts, &zt, &s, lp.layout.w);
    let q_reward = verts.iter().map(|&u| to_f64(&knap.rewards[u])).sum();
    let mut thresholds = vec![vec![(Threshold::Never, Rational::one())]];
    thresholds.extend(
        verts
            .iter()
            .zip(zt.iter().zip(&s))
            .map(|(&u, (z, s))| hazard_thresholds(small.dist(u), z, s)),
    );
    let policy = CancellationPolicy {
        sequence: q.clone(),
        thresholds,
    };
    let value = eval_cancellation_exact(small, &policy)?;
    Ok(CancelBranch {
        lp,
        knap,
        induced_value,
        induced_violation,
        kolp_objective: ko.objective,
        q,
        q_reward,
        zt,
        s,
        ck_violation,
        policy,
        value,
    })
}

#[derive(Debug, Clone)]
pub struct CancelRun {
    /// The large part, solved without cancelling.
    pub large: PolyRun,
    pub cancel: CancelBranch,
    /// Each branch's exact value on the full instance.
    pub large_value: Rational,
    pub cancel_value: Rational,
    /// `(large_value + cancel_value) / 2`.
    pub value: Rational,
}

impl CancelRun {
    pub fn no_cancel_policy(&self) -> &RandomizedPolicy {
        self.large.policy()
    }
}

/// Runs either branch with probability 1/2.
pub fn cancel_pipeline(inst: &CorrKOInstance, opts: PolyOptions) -> Result<CancelRun> {
    let (large, small) = split_rewards(inst);
    let large_run = poly_logw(&large, opts)?;
    let cancel = cancel_branch(&small)?;
    let large_value = large_run.policy().exact_value(inst)?;
    let cancel_value = eval_cancellation_exact(inst, &cancel.policy)?;
    let value = (&large_value + &cancel_value) * ratio(1, 2);
    Ok(CancelRun {
        large: large_run,
        cancel,
        large_value,
        cancel_value,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::rational::int;
    use corrko_core::{Atom, FiniteMetric, JointDistribution};

    fn inst(dists: Vec<JointDistribution>, w: u32) -> CorrKOInstance {
        let n = dists.len();
        CorrKOInstance::new(FiniteMetric::single_location(n), 0, BigUint::from(w), dists).unwrap()
    }

    #[test]
    fn point_sizes_never_cancel() {
        let i = inst(
            vec![
                JointDistribution::zero(),
                JointDistribution::point(2u32, int(1)),
                JointDistribution::point(3u32, int(2)),
            ],
            6,
        );
        let b = cancel_branch(&i).unwrap();
        assert!(b.ck_violation < 1e-7);
        for td in &b.policy.thresholds {
            assert_eq!(td, &vec![(Threshold::Never, Rational::one())]);
        }
        assert_eq!(b.value, int(3));
    }

    #[test]
    fn hazard_form_recovers_a_known_threshold() {
        // Sizes 1 or 4 with equal probability, cancelled at 2 w.p. 1/2.
        let d = JointDistribution::new(vec![
            Atom::new(1u32, int(1), ratio(1, 2)),
            Atom::new(4u32, int(0), ratio(1, 2)),
        ])
        .unwrap();
        // z_t = Pr[S ≥ t] Pr[T ≥ t], s_t = z_t - z_{t+1}.
        let z = vec![1.0, 1.0, 0.5, 0.25, 0.25, 0.0];
        let s: Vec<f64> = (0..z.len()).map(|t| z[t] - z.get(t + 1).copied().unwrap_or(0.0)).collect();
        let td = hazard_thresholds(&d, &z, &s);
        assert_eq!(td, vec![(Threshold::At(2), ratio(1, 2)), (Threshold::Never, ratio(1, 2))]);
    }

    #[test]
    fn search_finds_the_useful_cancellation() {
        // Vertex 1 is long half the time and blocks vertex 2; cancelling it
        // at 1 keeps room for vertex 2.
        let long = JointDistribution::new(vec![
            Atom::new(1u32, int(1), ratio(1, 2)),
            Atom::new(3u32, int(0), ratio(1, 2)),
        ])
        .unwrap();
        let i = inst(vec![JointDistribution::zero(), long, JointDistribution::point(3u32, int(1))], 4);
        let (v, pol) = search_thresholds(&i, &[0, 1, 2]).unwrap();
        assert_eq!(v, int(3) / int(2));
        assert_eq!(pol.thresholds[1], vec![(Threshold::At(1), Rational::one())]);
        let (opt, _) = brute_force_cancellation(&i).unwrap();
        assert_eq!(opt, v);
    }
}
