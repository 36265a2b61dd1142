//! Scalar abstraction shared by the Walsh layer and the semigroups.
//!
//! Floating point (`f32`, `f64`) and exact rationals (`BigRational`)
//! implement [`Scalar`], so the same transform code runs either
//! approximately or exactly.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for all probability laws.
pub type Rational = BigRational;

/// Numeric type usable as coefficients of observables and spectra.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// `false` for NaN or infinite floats; always `true` for rationals.
    fn is_finite_value(&self) -> bool;

    /// Exact division by a power of two.
    fn div_pow2(&self, k: u32) -> Self;

    fn pow_u32(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }
            fn div_pow2(&self, k: u32) -> Self {
                *self / (2.0 as $t).powi(k as i32)
            }
            fn pow_u32(&self, k: u32) -> Self {
                self.powi(k as i32)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_finite_value(&self) -> bool {
        true
    }
    fn div_pow2(&self, k: u32) -> Self {
        self / BigRational::from_integer(BigInt::one() << k as usize)
    }
    fn pow_u32(&self, k: u32) -> Self {
        num_traits::pow(self.clone(), k as usize)
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses the literal `"num/den"` (or a bare integer). Decimal floats are
/// rejected so that every probability entering a DP is exact.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("expected a rational literal num/den, got {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    Scalar::to_f64(r)
}

/// Binomial coefficient `C(n, k)` as an exact integer; zero outside `0..=n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= BigInt::from(n - j);
        acc /= BigInt::from(j + 1);
    }
    acc
}

pub fn factorial(n: i64) -> BigInt {
    (1..=n.max(0)).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `2^{-k}` as an exact rational.
pub fn pow2_inv(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Least common multiple of the denominators, used for exact sampling.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_literals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 3 / 9 ").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("2").unwrap(), rat_int(2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(10, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn exact_pow2_division() {
        assert_eq!(rat_int(3).div_pow2(3), rat(3, 8));
        assert_eq!(3.0f64.div_pow2(3), 0.375);
    }
}
