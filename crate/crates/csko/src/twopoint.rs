//! Two-point instances and their equivalence with knapsack orienteering
//! under knapsack deadlines.
//!
//! Canonical form: every non-root vertex is `(s1, R)` with probability
//! `p ∈ (0, 1/2]` and `(s2, 0)` otherwise, where `W ≥ s1 > floor(W/2) ≥ s2`.

use corrko_core::policy::{eval_nonadaptive_exact, NonAdaptivePolicy};
use corrko_core::rational::{from_biguint, int, ratio, Rational};
use corrko_core::{Atom, CorrKOInstance, JointDistribution};
use corrko_detsolve::{knapokd_exact, KnapOkdInstance, OrientKdInstance, Solution, Terminals};
use num::bigint::{BigInt, BigUint, Sign};
use num::traits::{One, Zero};

use crate::error::{CskoError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPoint {
    pub s1: BigUint,
    pub s2: BigUint,
    pub reward: Rational,
    pub p: Rational,
}

fn not_canonical(v: usize, why: &str) -> CskoError {
    CskoError::NotCanonical(format!("vertex {v}: {why}"))
}

/// Reads the canonical parameters of every non-root vertex (`None` for the
/// root).
pub fn two_point_form(inst: &CorrKOInstance) -> Result<Vec<Option<TwoPoint>>> {
    let half = inst.half_w();
    let half_p = ratio(1, 2);
    (0..inst.n())
        .map(|v| {
            if v == inst.root() {
                return Ok(None);
            }
            let atoms = inst.dist(v).atoms();
            let [a, b] = atoms else {
                return Err(not_canonical(v, "needs exactly two atoms"));
            };
            let (large, small) = if a.size > b.size { (a, b) } else { (b, a) };
            if large.size <= half || small.size > half {
                return Err(not_canonical(v, "sizes must straddle floor(W/2)"));
            }
            if &large.size > inst.w() {
                return Err(not_canonical(v, "large size exceeds W"));
            }
            if !small.reward.is_zero() {
                return Err(not_canonical(v, "small outcome carries reward"));
            }
            if large.prob > half_p {
                return Err(not_canonical(v, "large probability above 1/2"));
            }
            Ok(Some(TwoPoint {
                s1: large.size.clone(),
                s2: small.size.clone(),
                reward: large.reward.clone(),
                p: large.prob.clone(),
            }))
        })
        .collect()
}

pub fn is_canonical(inst: &CorrKOInstance) -> bool {
    two_point_form(inst).is_ok()
}

/// Rewards `pR`, weights `s2`, deadlines `W - s1 + s2`, extra weights `p`
/// with budget 1.
pub fn tcsko_to_okd(inst: &CorrKOInstance) -> Result<KnapOkdInstance> {
    let form = two_point_form(inst)?;
    let w = from_biguint(inst.w());
    let mut rewards = vec![];
    let mut weights = vec![];
    let mut deadlines = vec![];
    let mut extra = vec![];
    for tp in &form {
        match tp {
            None => {
                rewards.push(Rational::zero());
                weights.push(Rational::zero());
                deadlines.push(w.clone());
                extra.push(Rational::zero());
            }
            Some(tp) => {
                rewards.push(&tp.p * &tp.reward);
                weights.push(from_biguint(&tp.s2));
                deadlines.push(&w - from_biguint(&tp.s1) + from_biguint(&tp.s2));
                extra.push(tp.p.clone());
            }
        }
    }
    let okd = OrientKdInstance::new(
        inst.metric().clone(),
        Terminals::rooted(inst.root()),
        inst.b(),
        rewards,
        weights,
        deadlines,
    )?;
    Ok(KnapOkdInstance::new(okd, extra, Rational::one())?)
}

fn to_biguint(x: &Rational, what: &str, v: usize) -> Result<BigUint> {
    if !x.is_integer() || x.numer().sign() == Sign::Minus {
        return Err(not_canonical(v, &format!("{what} {x} is not a non-negative integer")));
    }
    Ok(x.to_integer().to_biguint().expect("non-negative"))
}

/// The inverse map: `s1 = W - KD + wt`, `s2 = wt`, `p = b`, `R = π/p`.
/// `W` defaults to `1 + 2 max KD`. Requires integer weights and deadlines,
/// extra budget 1 and `0 < b ≤ 1/2` off the root.
pub fn okd_to_tcsko(j: &KnapOkdInstance, w: Option<BigUint>) -> Result<CorrKOInstance> {
    let okd = &j.okd;
    if !j.extra_budget.is_one() {
        return Err(CskoError::NotCanonical("extra budget must be 1".into()));
    }
    if okd.terminals.end.is_some() {
        return Err(CskoError::NotCanonical("rooted instance required".into()));
    }
    let root = okd.root();
    let w = match w {
        Some(w) => w,
        None => {
            let max_kd = (0..okd.n())
                .map(|v| to_biguint(&okd.deadlines[v], "deadline", v))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or_default();
            max_kd * 2u32 + 1u32
        }
    };
    let w_rat = Rational::from_integer(BigInt::from(w.clone()));
    let mut dists = vec![];
    for v in 0..okd.n() {
        if v == root {
            dists.push(JointDistribution::zero());
            continue;
        }
        let p = &j.extra_weights[v];
        if p.is_zero() {
            return Err(not_canonical(v, "zero extra weight"));
        }
        if *p > ratio(1, 2) {
            return Err(not_canonical(v, "extra weight above 1/2"));
        }
        let s2 = to_biguint(&okd.weights[v], "weight", v)?;
        let s1 = to_biguint(&(&w_rat - &okd.deadlines[v] + &okd.weights[v]), "large size", v)?;
        let reward = &okd.rewards[v] / p;
        dists.push(JointDistribution::new(vec![
            Atom::new(s1, reward, p.clone()),
            Atom::new(s2, Rational::zero(), Rational::one() - p),
        ])?);
    }
    let inst = CorrKOInstance::new(okd.metric.clone(), okd.length_budget, w, dists)?;
    two_point_form(&inst)?;
    Ok(inst)
}

/// `Σ p_v R_v ∏_{w before v} (1 - p_w)` over the vertices reached within
/// the travel budget whose large size fits after the earlier small sizes.
pub fn expreward_formula(inst: &CorrKOInstance, seq: &[usize]) -> Result<Rational> {
    let form = two_point_form(inst)?;
    let mut total = Rational::zero();
    let mut survive = Rational::one();
    let mut small_sum = BigUint::zero();
    let mut travel = 0u64;
    for win in seq.windows(2) {
        travel += inst.d(win[0], win[1]);
        if travel > inst.b() {
            break;
        }
        let Some(tp) = &form[win[1]] else { continue };
        if &small_sum + &tp.s1 <= *inst.w() {
            total += &tp.p * &tp.reward * &survive;
        }
        survive *= Rational::one() - &tp.p;
        small_sum += &tp.s2;
    }
    Ok(total)
}

/// `Σ_{v∈σ} p_v R_v`, the knapsack-deadline reward of a path.
pub fn okd_reward(inst: &CorrKOInstance, seq: &[usize]) -> Result<Rational> {
    let form = two_point_form(inst)?;
    Ok(seq
        .iter()
        .filter_map(|&v| form[v].as_ref())
        .map(|tp| &tp.p * &tp.reward)
        .sum())
}

#[derive(Debug, Clone)]
pub struct TwoPointRun {
    pub okd: KnapOkdInstance,
    pub solution: Solution,
    pub policy: NonAdaptivePolicy,
    pub value: Rational,
}

/// Solves the knapsack-deadline instance exactly and runs its path.
pub fn solve_two_point(inst: &CorrKOInstance) -> Result<TwoPointRun> {
    let okd = tcsko_to_okd(inst)?;
    let solution = knapokd_exact(&okd)?;
    let policy = NonAdaptivePolicy::new(solution.path.clone());
    let value = eval_nonadaptive_exact(inst, &policy)?;
    Ok(TwoPointRun {
        okd,
        solution,
        policy,
        value,
    })
}

/// The factor lost by running a feasible knapsack-deadline path.
pub fn path_factor() -> Rational {
    int(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::FiniteMetric;

    fn inst() -> CorrKOInstance {
        let tp = |s1: u32, s2: u32, r: i64, p: Rational| {
            JointDistribution::new(vec![
                Atom::new(s1, int(r), p.clone()),
                Atom::new(s2, Rational::zero(), Rational::one() - p),
            ])
            .unwrap()
        };
        CorrKOInstance::new(
            FiniteMetric::single_location(3),
            0,
            BigUint::from(6u32),
            vec![JointDistribution::zero(), tp(4, 1, 3, ratio(1, 2)), tp(5, 2, 4, ratio(1, 3))],
        )
        .unwrap()
    }

    #[test]
    fn forward_map_values() {
        let j = tcsko_to_okd(&inst()).unwrap();
        assert_eq!(j.okd.rewards, vec![int(0), ratio(3, 2), ratio(4, 3)]);
        assert_eq!(j.okd.weights, vec![int(0), int(1), int(2)]);
        assert_eq!(j.okd.deadlines, vec![int(6), int(3), int(3)]);
        assert_eq!(j.extra_weights, vec![int(0), ratio(1, 2), ratio(1, 3)]);
    }

    #[test]
    fn round_trip_with_the_original_budget() {
        let i = inst();
        let j = tcsko_to_okd(&i).unwrap();
        assert_eq!(okd_to_tcsko(&j, Some(i.w().clone())).unwrap(), i);
        // The default budget is 1 + 2 * 6.
        assert_eq!(okd_to_tcsko(&j, None).unwrap().w(), &BigUint::from(13u32));
    }

    #[test]
    fn formula_matches_exact_evaluation() {
        let i = inst();
        for seq in [vec![0, 1, 2], vec![0, 2, 1], vec![0, 1], vec![0]] {
            let exact = eval_nonadaptive_exact(&i, &NonAdaptivePolicy::new(seq.clone())).unwrap();
            assert_eq!(expreward_formula(&i, &seq).unwrap(), exact, "{seq:?}");
        }
        // Order 1, 2: 2 needs 1 + 5 <= 6, so it pays (1/2)(1/3)4.
        assert_eq!(expreward_formula(&i, &[0, 1, 2]).unwrap(), ratio(3, 2) + ratio(2, 3));
    }

    #[test]
    fn rejects_non_canonical_input() {
        let i = inst();
        let bad = i
            .with_dists(vec![
                JointDistribution::zero(),
                JointDistribution::point(4u32, int(1)),
                i.dist(2).clone(),
            ])
            .unwrap();
        assert!(matches!(tcsko_to_okd(&bad), Err(CskoError::NotCanonical(_))));
    }
}
