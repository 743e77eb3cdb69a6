use num::bigint::BigUint;
use num::traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AdaptivePolicyTree, CancellationPolicy, NonAdaptivePolicy, Threshold};
use crate::error::{CoreError, Result};
use crate::instance::CorrKOInstance;
use crate::rational::to_f64;

#[derive(Debug, Clone, Copy)]
pub enum PolicyRef<'a> {
    NonAdaptive(&'a NonAdaptivePolicy),
    Adaptive(&'a AdaptivePolicyTree),
    Cancellation(&'a CancellationPolicy),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSummary {
    pub trials: u64,
    pub mean: f64,
    pub stdev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Cumulative outcome probabilities of one vertex, as floats.
struct Sampler {
    cumulative: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(inst: &CorrKOInstance) -> Self {
        let cumulative = inst
            .dists()
            .iter()
            .map(|d| {
                let mut acc = 0.0;
                d.atoms()
                    .iter()
                    .map(|a| {
                        acc += to_f64(&a.prob);
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { cumulative }
    }

    fn atom(&self, v: usize, rng: &mut ChaCha8Rng) -> usize {
        let cum = &self.cumulative[v];
        if cum.len() == 1 {
            return 0;
        }
        let u: f64 = rng.gen::<f64>() * cum[cum.len() - 1];
        cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
    }
}

fn draw_threshold(td: &[(Threshold, crate::Rational)], rng: &mut ChaCha8Rng) -> Threshold {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (t, p) in td {
        acc += to_f64(p);
        if u < acc {
            return *t;
        }
    }
    td[td.len() - 1].0
}

/// Monte Carlo estimate of a policy's expected reward. Trial `t` draws from
/// stream `t` of a ChaCha generator keyed by `seed`, and per-trial rewards are
/// summed in trial order, so the result does not depend on thread count.
pub fn simulate(
    inst: &CorrKOInstance,
    policy: PolicyRef<'_>,
    trials: u64,
    seed: u64,
) -> Result<SimSummary> {
    if trials == 0 {
        return Err(CoreError::InvalidPolicy("need at least one trial".into()));
    }
    match policy {
        PolicyRef::NonAdaptive(p) => p.check(inst)?,
        PolicyRef::Cancellation(p) => p.check(inst)?,
        PolicyRef::Adaptive(t) => {
            super::eval_adaptive_exact(inst, t)?;
        }
    }
    let sampler = Sampler::new(inst);
    let rewards: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            run_once(inst, policy, &sampler, &mut rng)
        })
        .collect();
    let n = trials as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = if trials > 1 {
        rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let stdev = var.sqrt();
    let half = 1.96 * stdev / n.sqrt();
    Ok(SimSummary {
        trials,
        mean,
        stdev,
        ci_low: mean - half,
        ci_high: mean + half,
    })
}

fn run_once(
    inst: &CorrKOInstance,
    policy: PolicyRef<'_>,
    sampler: &Sampler,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let w = inst.w();
    let mut elapsed = BigUint::zero();
    let mut reward = 0.0;
    match policy {
        PolicyRef::NonAdaptive(p) => {
            let mut travel = 0;
            for win in p.sequence.windows(2) {
                travel += inst.d(win[0], win[1]);
                if travel > inst.b() {
                    break;
                }
                let atom = &inst.dist(win[1]).atoms()[sampler.atom(win[1], rng)];
                elapsed += &atom.size;
                if &elapsed > w {
                    break;
                }
                reward += to_f64(&atom.reward);
            }
        }
        PolicyRef::Cancellation(p) => {
            let mut travel = 0;
            for i in 1..p.sequence.len() {
                let v = p.sequence[i];
                travel += inst.d(p.sequence[i - 1], v);
                if travel > inst.b() {
                    break;
                }
                let th = draw_threshold(&p.thresholds[i], rng);
                let atom = &inst.dist(v).atoms()[sampler.atom(v, rng)];
                let pays = match th {
                    Threshold::At(t) if atom.size > BigUint::from(t) => {
                        elapsed += t;
                        false
                    }
                    _ => {
                        elapsed += &atom.size;
                        true
                    }
                };
                if &elapsed > w {
                    break;
                }
                if pays {
                    reward += to_f64(&atom.reward);
                }
            }
        }
        PolicyRef::Adaptive(tree) => {
            let mut node = 0;
            loop {
                let n = tree.node(node);
                let a = sampler.atom(n.vertex, rng);
                let atom = &inst.dist(n.vertex).atoms()[a];
                elapsed += &atom.size;
                if &elapsed > w {
                    break;
                }
                reward += to_f64(&atom.reward);
                match n.children[a] {
                    Some(c) => node = c,
                    None => break,
                }
            }
        }
    }
    reward
}

#[cfg(test)]
mod tests {
    use super::super::tests::line_instance;
    use super::super::{eval_nonadaptive_exact, AdaptivePolicyTree};
    use super::*;
    use crate::dist::JointDistribution;
    use crate::metric::FiniteMetric;
    use crate::rational::int;

    #[test]
    fn deterministic_instance_has_zero_spread() {
        let inst = CorrKOInstance::new(
            FiniteMetric::single_location(2),
            0,
            BigUint::from(3u32),
            vec![JointDistribution::zero(), JointDistribution::point(1u32, int(2))],
        )
        .unwrap();
        let pol = NonAdaptivePolicy::new(vec![0, 1]);
        let s = simulate(&inst, PolicyRef::NonAdaptive(&pol), 50, 7).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.stdev, 0.0);
    }

    #[test]
    fn same_seed_same_output_and_close_to_exact() {
        let inst = line_instance();
        let pol = NonAdaptivePolicy::new(vec![0, 1, 2]);
        let a = simulate(&inst, PolicyRef::NonAdaptive(&pol), 20_000, 11).unwrap();
        let b = simulate(&inst, PolicyRef::NonAdaptive(&pol), 20_000, 11).unwrap();
        assert_eq!(a, b);
        let exact = to_f64(&eval_nonadaptive_exact(&inst, &pol).unwrap());
        assert!((a.mean - exact).abs() <= 5.0 * a.stdev / (20_000f64).sqrt() + 1e-12);
        let tree = AdaptivePolicyTree::from_chain(&inst, &pol).unwrap();
        let c = simulate(&inst, PolicyRef::Adaptive(&tree), 20_000, 11).unwrap();
        assert_eq!(c.mean, a.mean);
    }

    #[test]
    fn zero_trials_rejected() {
        let inst = line_instance();
        let pol = NonAdaptivePolicy::new(vec![0]);
        assert!(simulate(&inst, PolicyRef::NonAdaptive(&pol), 0, 1).is_err());
    }
}
