use num::bigint::BigUint;
use num::traits::Zero;

use crate::dist::JointDistribution;
use crate::instance::CorrKOInstance;
use crate::rational::{ceil_log2, from_biguint, pow2, Rational};

/// `E[min(S, 2^j)]`.
pub fn truncated_mean(dist: &JointDistribution, j: u64) -> Rational {
    let cap = pow2(j);
    dist.atoms()
        .iter()
        .map(|a| from_biguint(if a.size < cap { &a.size } else { &cap }) * &a.prob)
        .sum()
}

/// `E[R · 1{S <= W - t}]`: expected reward if processing starts at time `t`.
pub fn start_reward(dist: &JointDistribution, t: &BigUint, w: &BigUint) -> Rational {
    if t > w {
        return Rational::zero();
    }
    let slack = w - t;
    dist.atoms()
        .iter()
        .filter(|a| a.size <= slack)
        .map(|a| &a.prob * &a.reward)
        .sum()
}

/// Precomputed truncated means `mu[v][j]` for `j = 0..=L` with `L = ceil(log2 W)`.
#[derive(Debug, Clone)]
pub struct TruncatedStats {
    levels: u64,
    mu: Vec<Vec<Rational>>,
    dists: Vec<JointDistribution>,
    w: BigUint,
}

impl TruncatedStats {
    pub fn new(inst: &CorrKOInstance) -> Self {
        let levels = ceil_log2(inst.w());
        let mu = inst
            .dists()
            .iter()
            .map(|d| (0..=levels).map(|j| truncated_mean(d, j)).collect())
            .collect();
        Self {
            levels,
            mu,
            dists: inst.dists().to_vec(),
            w: inst.w().clone(),
        }
    }

    /// `L = ceil(log2 W)`.
    pub fn levels(&self) -> u64 {
        self.levels
    }

    pub fn mu(&self, v: usize, j: u64) -> &Rational {
        &self.mu[v][j as usize]
    }

    pub fn pi(&self, v: usize, t: &BigUint) -> Rational {
        start_reward(&self.dists[v], t, &self.w)
    }

    /// `π_v(2^j - 1)`.
    pub fn pi_level(&self, v: usize, j: u64) -> Rational {
        self.pi(v, &(pow2(j) - 1u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Atom;
    use crate::rational::{int, ratio};

    fn d(atoms: &[(u32, i64, (i64, i64))]) -> JointDistribution {
        JointDistribution::new(
            atoms
                .iter()
                .map(|&(s, r, (pn, pd))| Atom::new(s, int(r), ratio(pn, pd)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn truncated_mean_examples() {
        let zero = JointDistribution::zero();
        for j in 0..5 {
            assert_eq!(truncated_mean(&zero, j), int(0));
        }
        assert_eq!(truncated_mean(&d(&[(0, 0, (1, 2)), (4, 0, (1, 2))]), 1), int(1));
        assert_eq!(truncated_mean(&d(&[(1, 0, (1, 3)), (8, 0, (2, 3))]), 2), int(3));
    }

    #[test]
    fn start_reward_examples() {
        let w4 = BigUint::from(4u32);
        let one = d(&[(2, 5, (1, 1))]);
        assert_eq!(start_reward(&one, &BigUint::from(0u32), &w4), int(5));
        assert_eq!(start_reward(&one, &BigUint::from(3u32), &w4), int(0));
        assert_eq!(start_reward(&one, &BigUint::from(5u32), &w4), int(0));
        let w3 = BigUint::from(3u32);
        let two = d(&[(1, 1, (1, 2)), (3, 4, (1, 2))]);
        assert_eq!(start_reward(&two, &BigUint::from(0u32), &w3), ratio(5, 2));
        assert_eq!(start_reward(&two, &BigUint::from(1u32), &w3), ratio(1, 2));
    }
}
