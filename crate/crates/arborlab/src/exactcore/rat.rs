//! Arbitrary-precision rationals. `Rat` is `num_rational::BigRational`, which
//! already maintains the reduced form with positive denominator.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Renders `a/b` with the denominator omitted when it is 1.
pub fn rat_string(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses "a", "-a", or "a/b". Whitespace is not accepted.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

/// p-adic valuation of a nonzero rational.
pub fn valuation_rat(q: &Rat, p: u64) -> i64 {
    assert!(!q.is_zero());
    crate::util::valuation_big(q.numer(), p) as i64 - crate::util::valuation_big(q.denom(), p) as i64
}

pub fn rat_abs_log(q: &Rat) -> f64 {
    assert!(!q.is_zero());
    crate::util::ln_big(&q.numer().abs()) - crate::util::ln_big(&q.denom().abs())
}
