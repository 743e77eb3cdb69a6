//! Small helpers around arbitrary-precision rationals and integers.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite float; non-finite input maps to zero.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn pow2(j: u64) -> BigUint {
    BigUint::one() << j
}

pub fn pow2_rat(j: u64) -> Rational {
    from_biguint(&pow2(j))
}

/// Smallest `l` with `2^l >= w` (zero for `w <= 1`).
pub fn ceil_log2(w: &BigUint) -> u64 {
    if w <= &BigUint::one() {
        return 0;
    }
    (w - 1u32).bits()
}

/// Largest `l` with `2^l <= x` for a rational `x >= 1`.
pub fn floor_log2_rat(x: &Rational) -> u64 {
    assert!(x >= &Rational::one(), "floor_log2_rat needs x >= 1");
    let q = x.floor().to_integer();
    q.bits() - 1
}

pub fn pow_rat(base: &Rational, e: u64) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

/// Canonical text form `num/den`, integers included.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn min_rat(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Rational bounds on transcendental constants used by reference checks.
pub mod consts {
    use super::{ratio, Rational};

    /// An upper bound on `1/e`.
    pub fn inv_e_upper() -> Rational {
        ratio(2432, 6610)
    }

    /// A lower bound on `1/e` (0.36787944...).
    pub fn inv_e_lower() -> Rational {
        ratio(3_678_794, 10_000_000)
    }

    /// A lower bound on `e^{-1/2}` (0.60653065...).
    pub fn inv_sqrt_e_lower() -> Rational {
        ratio(6_065_306, 10_000_000)
    }

    /// An upper bound on `e^{-1/2}`.
    pub fn inv_sqrt_e_upper() -> Rational {
        ratio(6_065_307, 10_000_000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_helpers() {
        assert_eq!(ceil_log2(&BigUint::from(1u32)), 0);
        assert_eq!(ceil_log2(&BigUint::from(2u32)), 1);
        assert_eq!(ceil_log2(&BigUint::from(8u32)), 3);
        assert_eq!(ceil_log2(&BigUint::from(9u32)), 4);
        assert_eq!(floor_log2_rat(&ratio(7, 2)), 1);
        assert_eq!(floor_log2_rat(&int(4)), 2);
    }

    #[test]
    fn rational_text_round_trip() {
        let x = ratio(-6, 4);
        assert_eq!(format_rational(&x), "-3/2");
        assert_eq!(parse_rational("-3/2"), Some(x));
        assert_eq!(parse_rational("5"), Some(int(5)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn constant_bounds_bracket_reference_values() {
        let e_inv = (-1.0f64).exp();
        assert!(to_f64(&consts::inv_e_lower()) < e_inv);
        assert!(to_f64(&consts::inv_e_upper()) > e_inv);
        let h = (-0.5f64).exp();
        assert!(to_f64(&consts::inv_sqrt_e_lower()) < h);
        assert!(to_f64(&consts::inv_sqrt_e_upper()) > h);
    }
}
