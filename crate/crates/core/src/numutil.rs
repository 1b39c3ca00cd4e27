//! Exact big-integer combinatorics plus carefully-scoped float bridges.
//!
//! Everything exact stays exact (`BigUint` / `BigRational`).  The only float
//! conversions are logarithms, taken from the top 64 bits of the integer so
//! the relative error is a few ULPs regardless of magnitude.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// `C(a, b)` with the convention that out-of-range arguments give 0.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if b < 0 || a < 0 || b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b) as u64;
    let mut num = BigUint::one();
    for k in 0..b {
        num *= BigUint::from((a as u64) - k);
        num /= BigUint::from(k + 1);
    }
    num
}

/// Base-2 logarithm of a positive big integer, accurate to ~1e-15 relative.
pub fn lg_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "lg of zero");
    let bits = x.bits();
    if bits <= 53 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// Base-2 logarithm of a positive rational.
pub fn lg_ratio(x: &BigRational) -> f64 {
    assert!(x.is_positive(), "lg of non-positive rational");
    lg_biguint(x.numer().magnitude()) - lg_biguint(x.denom().magnitude())
}

pub fn lg_factorial(n: usize) -> f64 {
    lg_biguint(&factorial(n))
}

/// Natural logarithm via [`lg_biguint`].
pub fn ln_biguint(x: &BigUint) -> f64 {
    lg_biguint(x) * std::f64::consts::LN_2
}

pub fn big_ratio(numer: BigUint, denom: BigUint) -> BigRational {
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, numer),
        BigInt::from_biguint(Sign::Plus, denom),
    )
}

/// Smallest integer >= x, as a big integer (x must be positive).
pub fn ceil_ratio(x: &BigRational) -> BigUint {
    assert!(x.is_positive());
    x.ceil().to_integer().magnitude().clone()
}

/// Rounds a float into an exact dyadic rational (mantissa / 2^k).  Used when
/// an irrational factor (a logarithm) has to enter otherwise-exact ceiling
/// arithmetic: the dyadic stand-in is within one part in 2^52 of the float.
pub fn dyadic_from_f64(x: f64) -> BigRational {
    assert!(x.is_finite());
    let (mantissa, exponent, sign) = decompose(x);
    let numer = BigInt::from(sign as i64) * BigInt::from(mantissa);
    if exponent >= 0 {
        BigRational::from_integer(numer << exponent as usize)
    } else {
        BigRational::new(numer, BigInt::one() << (-exponent) as usize)
    }
}

fn decompose(x: f64) -> (u64, i16, i8) {
    let bits = x.to_bits();
    let sign: i8 = if bits >> 63 == 0 { 1 } else { -1 };
    let mut exponent = ((bits >> 52) & 0x7ff) as i16;
    let mantissa = if exponent == 0 {
        (bits & 0xfffffffffffff) << 1
    } else {
        (bits & 0xfffffffffffff) | 0x10000000000000
    };
    exponent -= 1075;
    (mantissa, exponent, sign)
}
