//! Randomized non-adaptive policies: fixed sequences, independently thinned
//! paths, and finite mixtures of those.

use std::collections::BTreeMap;

use corrko_core::policy::{eval_nonadaptive_exact, thinned_value_exact, NonAdaptivePolicy};
use corrko_core::rational::{to_f64, Rational};
use corrko_core::CorrKOInstance;
use num::bigint::BigUint;
use num::traits::{One, Zero};
use rand::Rng;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RandomizedPolicy {
    Fixed(NonAdaptivePolicy),
    /// Every non-root vertex of `path` is kept independently with
    /// probability `keep`.
    Thinned { path: Vec<usize>, keep: Rational },
    /// Runs each branch with its probability; the probabilities sum to one.
    Mixture(Vec<(Rational, RandomizedPolicy)>),
}

impl RandomizedPolicy {
    pub fn root_only(inst: &CorrKOInstance) -> Self {
        Self::Fixed(NonAdaptivePolicy::root_only(inst))
    }

    /// Exact expected reward over the policy's randomness and the sizes.
    pub fn exact_value(&self, inst: &CorrKOInstance) -> Result<Rational> {
        Ok(match self {
            Self::Fixed(p) => eval_nonadaptive_exact(inst, p)?,
            Self::Thinned { path, keep } => thinned_value_exact(inst, path, keep)?,
            Self::Mixture(parts) => {
                let mut total = Rational::zero();
                for (w, p) in parts {
                    if !w.is_zero() {
                        total += w * p.exact_value(inst)?;
                    }
                }
                total
            }
        })
    }

    /// Draws one deterministic sequence.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> NonAdaptivePolicy {
        match self {
            Self::Fixed(p) => p.clone(),
            Self::Thinned { path, keep } => {
                let q = to_f64(keep);
                let mut seq = path[..1.min(path.len())].to_vec();
                seq.extend(path.iter().skip(1).filter(|_| rng.gen::<f64>() < q));
                NonAdaptivePolicy::new(seq)
            }
            Self::Mixture(parts) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (w, p) in parts {
                    acc += to_f64(w);
                    if u < acc {
                        return p.sample(rng);
                    }
                }
                parts.last().expect("non-empty mixture").1.sample(rng)
            }
        }
    }

    /// Renames vertices through `ids` (sub-instance id to original id).
    pub fn map_vertices(&self, ids: &[usize]) -> Self {
        match self {
            Self::Fixed(p) => Self::Fixed(NonAdaptivePolicy::new(p.sequence.iter().map(|&v| ids[v]).collect())),
            Self::Thinned { path, keep } => Self::Thinned {
                path: path.iter().map(|&v| ids[v]).collect(),
                keep: keep.clone(),
            },
            Self::Mixture(parts) => Self::Mixture(parts.iter().map(|(w, p)| (w.clone(), p.map_vertices(ids))).collect()),
        }
    }

    /// Mixes `parts` with probabilities proportional to their weights.
    pub fn mix(parts: Vec<(Rational, RandomizedPolicy)>) -> Self {
        let total: Rational = parts.iter().map(|(w, _)| w).sum();
        Self::Mixture(parts.into_iter().map(|(w, p)| (w / &total, p)).collect())
    }
}

/// Probability that the thinned version of `path` processes the vertex at
/// position `pos` no later than time `t`: the vertex is kept and the kept
/// predecessors' sizes add up to at most `t`. `path` must fit the travel
/// budget.
pub fn thinned_start_prob(inst: &CorrKOInstance, path: &[usize], keep: &Rational, pos: usize, t: &BigUint) -> Rational {
    let drop = Rational::one() - keep;
    let mut mass: BTreeMap<BigUint, Rational> = BTreeMap::new();
    mass.insert(BigUint::zero(), Rational::one());
    for &w in path.iter().take(pos).skip(1) {
        let mut next: BTreeMap<BigUint, Rational> = BTreeMap::new();
        for (e, p) in &mass {
            *next.entry(e.clone()).or_insert_with(Rational::zero) += p * &drop;
            for a in inst.dist(w).atoms() {
                let c = e + &a.size;
                if &c <= t {
                    *next.entry(c).or_insert_with(Rational::zero) += p * keep * &a.prob;
                }
            }
        }
        mass = next;
    }
    let within: Rational = mass.values().sum();
    if pos == 0 {
        within
    } else {
        keep * within
    }
}
