//! The constants `L`, `K` and `N1` shared by the structural results.

use corrko_core::rational::{ceil_log2, from_u64, pow2_rat, Rational};
use num::bigint::BigUint;
use num::ToPrimitive;

/// `L = ceil(log2 W)`, `K = 3 log2(6 log2 W) + 12` and `N1 = 2(K+1)`.
///
/// `K` is kept as an integer upper bound of its real value: the inner
/// `log2 W` becomes `max(1, L)` and the outer logarithm is rounded up, so
/// every threshold built from it is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralParams {
    pub l: u64,
    pub k: u64,
    pub n1: u64,
}

impl StructuralParams {
    pub fn new(w: &BigUint) -> Self {
        let l = ceil_log2(w);
        let k = 3 * ceil_log2(&BigUint::from(6 * l.max(1))) + 12;
        Self { l, k, n1: 2 * (k + 1) }
    }

    /// The real-valued `K`, when `log2 W > 0`.
    pub fn k_real(w: &BigUint) -> Option<f64> {
        let lw = w.to_f64()?.log2();
        (lw > 0.0).then(|| 3.0 * (6.0 * lw).log2() + 12.0)
    }

    /// `(K+1) 2^j`.
    pub fn prefix_cap(&self, j: u64) -> Rational {
        from_u64(self.k + 1) * pow2_rat(j)
    }

    /// `5(K+1) 2^j`, the rejection threshold of the rounding.
    pub fn reject_cap(&self, j: u64) -> Rational {
        from_u64(5) * self.prefix_cap(j)
    }

    /// `1/(10(K+1))`, the thinning rate of the rounding.
    pub fn keep_prob(&self) -> Rational {
        Rational::new(1.into(), (10 * (self.k + 1)).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_upper_bounds() {
        let p = StructuralParams::new(&BigUint::from(8u32));
        assert_eq!(p.l, 3);
        // 6 * 3 = 18, ceil(log2 18) = 5.
        assert_eq!(p.k, 27);
        assert_eq!(p.n1, 56);
        let real = StructuralParams::k_real(&BigUint::from(8u32)).unwrap();
        assert!(real <= p.k as f64 && real > 24.0);
    }

    #[test]
    fn unit_budget_uses_one_for_the_inner_log() {
        let p = StructuralParams::new(&BigUint::from(1u32));
        assert_eq!(p.l, 0);
        assert_eq!(p.k, 21);
        assert!(StructuralParams::k_real(&BigUint::from(1u32)).is_none());
    }

    #[test]
    fn k_dominates_its_real_value() {
        for w in 2u32..200 {
            let w = BigUint::from(w);
            let p = StructuralParams::new(&w);
            assert!(StructuralParams::k_real(&w).unwrap() <= p.k as f64 + 1e-9);
        }
    }

    #[test]
    fn thresholds() {
        let p = StructuralParams::new(&BigUint::from(4u32));
        assert_eq!(p.k, 24);
        assert_eq!(p.prefix_cap(2), from_u64(100));
        assert_eq!(p.reject_cap(0), from_u64(125));
        assert_eq!(p.keep_prob(), Rational::new(1.into(), 250.into()));
    }
}
