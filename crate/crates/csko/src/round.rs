//! Randomized rounding of the configuration LP into a non-adaptive policy.

use corrko_core::policy::NonAdaptivePolicy;
use corrko_core::rational::{pow2, to_f64, Rational};
use corrko_core::{truncated_mean, CorrKOInstance};
use corrko_detsolve::Path;
use num::bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::configlp::ConfigLpSolution;
use crate::randomized::thinned_start_prob;
use crate::structure::PortalStructure;

#[derive(Debug, Clone)]
pub struct RoundOutcome {
    /// Path picked for each portal pair.
    pub picked: Vec<Path>,
    /// `Σ_{h≤j} μ^j(P_{a,b} - b)` per level.
    pub loads: Vec<Rational>,
    pub rejected: bool,
    /// Concatenation with repeats removed, before thinning.
    pub concatenated: Path,
    /// Level of the pair each vertex of `concatenated` was taken from; the
    /// final portal has none.
    pub levels: Vec<Option<u64>>,
    pub policy: NonAdaptivePolicy,
}

/// Steps 1-3 for a given choice of pair paths.
fn assemble(inst: &CorrKOInstance, ps: &PortalStructure, picked: Vec<Path>) -> RoundOutcome {
    let k = ps.k();
    let loads: Vec<Rational> = (0..=k)
        .map(|j| {
            ps.pairs
                .iter()
                .zip(&picked)
                .filter(|(pair, _)| pair.level <= j)
                .flat_map(|(_, p)| p[..p.len() - 1].iter())
                .map(|&v| truncated_mean(inst.dist(v), j))
                .sum()
        })
        .collect();
    let rejected = loads.iter().enumerate().any(|(j, l)| *l > ps.params.reject_cap(j as u64));
    let mut seen = vec![false; inst.n()];
    let mut concatenated = vec![];
    let mut levels = vec![];
    let mut push = |v: usize, level: Option<u64>| {
        if !seen[v] {
            seen[v] = true;
            concatenated.push(v);
            levels.push(level);
        }
    };
    push(inst.root(), ps.pairs.first().map(|p| p.level));
    for (pair, p) in ps.pairs.iter().zip(&picked) {
        for &v in &p[..p.len() - 1] {
            push(v, Some(pair.level));
        }
    }
    push(*ps.q_star.last().expect("non-empty"), None);
    RoundOutcome {
        picked,
        loads,
        rejected,
        concatenated,
        levels,
        policy: NonAdaptivePolicy::root_only(inst),
    }
}

/// Runs the four rounding steps with a seeded generator. A rejected sample
/// returns the root-only policy.
pub fn csko_round(inst: &CorrKOInstance, ps: &PortalStructure, sol: &ConfigLpSolution, seed: u64) -> RoundOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked: Vec<Path> = ps
        .pairs
        .iter()
        .zip(&sol.pairs)
        .map(|(pair, pc)| {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (tau, &x) in pc.configs.iter().zip(&pc.x) {
                acc += x / 2.0;
                if u < acc {
                    return tau.clone();
                }
            }
            vec![pair.a, pair.b]
        })
        .collect();
    let mut out = assemble(inst, ps, picked);
    if !out.rejected {
        let keep = to_f64(&ps.params.keep_prob());
        let mut seq = vec![inst.root()];
        seq.extend(out.concatenated.iter().skip(1).filter(|_| rng.gen::<f64>() < keep));
        out.policy = NonAdaptivePolicy::new(seq);
    }
    out
}

/// Rounding with fixed pair paths and no thinning, e.g. the witness paths.
pub fn round_with_paths(inst: &CorrKOInstance, ps: &PortalStructure, picked: Vec<Path>) -> RoundOutcome {
    let mut out = assemble(inst, ps, picked);
    if !out.rejected {
        out.policy = NonAdaptivePolicy::new(out.concatenated.clone());
    }
    out
}

/// For each vertex of the concatenation taken from level `j`, the exact
/// probability that the thinned policy starts it by time `2^j - 1`.
pub fn start_probs(inst: &CorrKOInstance, ps: &PortalStructure, out: &RoundOutcome) -> Vec<(usize, Rational)> {
    let keep = ps.params.keep_prob();
    out.levels
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(pos, level)| {
            let j = (*level)?;
            let t: BigUint = pow2(j) - 1u32;
            Some((out.concatenated[pos], thinned_start_prob(inst, &out.concatenated, &keep, pos, &t)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrko_core::rational::int;
    use corrko_core::{FiniteMetric, JointDistribution};
    use crate::params::StructuralParams;
    use crate::structure::{PortalPair, StructureChecks};

    fn toy() -> (CorrKOInstance, PortalStructure) {
        let dists = vec![
            JointDistribution::zero(),
            JointDistribution::point(0u32, int(1)),
            JointDistribution::point(0u32, int(1)),
            JointDistribution::point(1u32, int(1)),
        ];
        let inst = CorrKOInstance::new(FiniteMetric::single_location(4), 0, BigUint::from(2u32), dists).unwrap();
        let pair = |a, b, path| PortalPair {
            level: 0,
            a,
            b,
            midpoint: a,
            gamma: 0,
            bound: 0,
            path,
        };
        let ps = PortalStructure {
            params: StructuralParams::new(inst.w()),
            q_star: vec![0, 1, 2, 3],
            elapsed: vec![BigUint::from(0u32); 4],
            phi_pos: vec![3],
            por_pos: vec![vec![0, 2, 3]],
            pairs: vec![pair(0, 2, vec![0, 1, 2]), pair(2, 3, vec![2, 3])],
            checks: StructureChecks::default(),
        };
        (inst, ps)
    }

    #[test]
    fn concatenation_keeps_first_occurrences() {
        let (inst, ps) = toy();
        let out = round_with_paths(&inst, &ps, vec![vec![0, 1, 2], vec![2, 1, 3]]);
        assert!(!out.rejected);
        assert_eq!(out.concatenated, vec![0, 1, 2, 3]);
        assert_eq!(out.levels, vec![Some(0), Some(0), Some(0), None]);
        assert_eq!(out.policy.sequence, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let (inst, ps) = toy();
        let sol = ConfigLpSolution {
            pairs: vec![
                crate::configlp::PairConfigs {
                    configs: vec![vec![0, 1, 2]],
                    x: vec![1.0],
                },
                crate::configlp::PairConfigs {
                    configs: vec![vec![2, 3]],
                    x: vec![1.0],
                },
            ],
            objective: 0.0,
            lp: corrko_lp::LinearProgram::new(corrko_lp::Objective::Maximize),
            lp_x: vec![],
        };
        let a = csko_round(&inst, &ps, &sol, 3);
        let b = csko_round(&inst, &ps, &sol, 3);
        assert_eq!(a.picked, b.picked);
        assert_eq!(a.policy, b.policy);
    }
}
