//! Seeded random fixtures: points on a grid, integer rewards and weights.

use corrko_core::adversarial::random_metric;
use corrko_core::rational::int;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DetError, Result};
use crate::instance::{KnapOrientInstance, OrientKdInstance, Terminals};

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(DetError::InvalidInstance("need at least two vertices".into()));
    }
    Ok(())
}

/// Rooted at 0 with length budget `b`; rewards in `[0, 9]`, weights in
/// `[0, 4]`, and a knapsack budget between 0 and half the largest possible total weight.
pub fn gen_knap_orient(n: usize, b: u64, seed: u64) -> Result<KnapOrientInstance> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = random_metric(&mut rng, n, b);
    let mut rewards = vec![int(0)];
    let mut weights = vec![int(0)];
    for _ in 1..n {
        rewards.push(int(rng.gen_range(0..=9)));
        weights.push(int(rng.gen_range(0..=4)));
    }
    let half_max = 2 * (n as i64 - 1);
    let budget = int(rng.gen_range(0..=half_max));
    KnapOrientInstance::new(metric, Terminals::rooted(0), b, rewards, weights, Some(budget))
}

/// As [`gen_knap_orient`] but from vertex 0 to vertex `n - 1`, with the
/// length and knapsack budgets raised so the direct path is feasible.
pub fn gen_p2p_knap_orient(n: usize, b: u64, seed: u64) -> Result<KnapOrientInstance> {
    let mut inst = gen_knap_orient(n, b, seed)?;
    inst.terminals = Terminals::p2p(0, n - 1);
    inst.length_budget = inst.length_budget.max(inst.metric.d(0, n - 1));
    let end_weight = inst.weights[n - 1].clone();
    inst.knap_budget = inst.knap_budget.map(|w| w.max(end_weight));
    Ok(inst)
}

/// Rooted at 0; rewards in `[0, 9]`, integer weights in `[0, 4]` and
/// deadlines in `[0, 10]`.
pub fn gen_orientkd(n: usize, b: u64, seed: u64) -> Result<OrientKdInstance> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = random_metric(&mut rng, n, b);
    let mut rewards = vec![int(0)];
    let mut weights = vec![int(0)];
    let mut deadlines = vec![int(0)];
    for _ in 1..n {
        rewards.push(int(rng.gen_range(0..=9)));
        weights.push(int(rng.gen_range(0..=4)));
        deadlines.push(int(rng.gen_range(0..=10)));
    }
    OrientKdInstance::new(metric, Terminals::rooted(0), b, rewards, weights, deadlines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(gen_knap_orient(6, 8, 3).unwrap(), gen_knap_orient(6, 8, 3).unwrap());
        assert_ne!(gen_orientkd(6, 8, 3).unwrap(), gen_orientkd(6, 8, 4).unwrap());
        let p = gen_p2p_knap_orient(5, 1, 9).unwrap();
        assert_eq!(p.terminals, Terminals::p2p(0, 4));
        assert!(p.length_budget >= p.metric.d(0, 4));
    }
}
