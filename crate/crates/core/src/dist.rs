use num::bigint::BigUint;
use num::traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::rational::Rational;

/// One outcome of a vertex's job: it takes `size` time and pays `reward`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub size: BigUint,
    pub reward: Rational,
    pub prob: Rational,
}

impl Atom {
    pub fn new(size: impl Into<BigUint>, reward: Rational, prob: Rational) -> Self {
        Self {
            size: size.into(),
            reward,
            prob,
        }
    }
}

/// A finitely supported joint distribution of (size, reward).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointDistribution {
    atoms: Vec<Atom>,
}

impl JointDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(CoreError::InvalidDistribution("no atoms".into()));
        }
        let mut total = Rational::zero();
        for (i, a) in atoms.iter().enumerate() {
            if !a.prob.is_positive() || a.prob > Rational::one() {
                return Err(CoreError::InvalidDistribution(format!(
                    "atom {i} has probability {} outside (0, 1]",
                    a.prob
                )));
            }
            if a.reward.is_negative() {
                return Err(CoreError::InvalidDistribution(format!(
                    "atom {i} has negative reward {}",
                    a.reward
                )));
            }
            total += &a.prob;
        }
        if !total.is_one() {
            return Err(CoreError::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Deterministic outcome.
    pub fn point(size: impl Into<BigUint>, reward: Rational) -> Self {
        Self {
            atoms: vec![Atom::new(size, reward, Rational::one())],
        }
    }

    /// The root's distribution: zero size, zero reward.
    pub fn zero() -> Self {
        Self::point(0u32, Rational::zero())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.len() == 1 && self.atoms[0].size.is_zero() && self.atoms[0].reward.is_zero()
    }

    pub fn expected_size(&self) -> Rational {
        self.atoms
            .iter()
            .map(|a| crate::rational::from_biguint(&a.size) * &a.prob)
            .sum()
    }

    pub fn expected_reward(&self) -> Rational {
        self.atoms.iter().map(|a| &a.reward * &a.prob).sum()
    }

    /// Smallest size of an atom carrying positive reward.
    pub fn min_rewarding_size(&self) -> Option<&BigUint> {
        self.atoms
            .iter()
            .filter(|a| a.reward.is_positive())
            .map(|a| &a.size)
            .min()
    }

    /// Same atoms with every reward passed through `f`.
    pub fn map_rewards(&self, f: impl Fn(&Atom) -> Rational) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    size: a.size.clone(),
                    reward: f(a),
                    prob: a.prob.clone(),
                })
                .collect(),
        }
    }

    pub fn prob_size_eq(&self, t: &BigUint) -> Rational {
        self.atoms
            .iter()
            .filter(|a| &a.size == t)
            .map(|a| a.prob.clone())
            .sum()
    }

    pub fn prob_size_ge(&self, t: &BigUint) -> Rational {
        self.atoms
            .iter()
            .filter(|a| &a.size >= t)
            .map(|a| a.prob.clone())
            .sum()
    }

    /// `E[R; S = t]`, the reward mass sitting exactly at size `t`.
    pub fn reward_mass_at(&self, t: &BigUint) -> Rational {
        self.atoms
            .iter()
            .filter(|a| &a.size == t)
            .map(|a| &a.prob * &a.reward)
            .sum()
    }
}
