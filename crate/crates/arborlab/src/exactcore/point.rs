//! Points of P^1(Q) in normalized homogeneous coordinates.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rat::{parse_rat, Rat};

/// (x1 : x2) with gcd(x1, x2) = 1 and either x2 > 0, or x2 = 0 and x1 = 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPointQ {
    x1: BigInt,
    x2: BigInt,
}

impl ProjPointQ {
    pub fn new(x1: BigInt, x2: BigInt) -> Self {
        assert!(
            !(x1.is_zero() && x2.is_zero()),
            "(0:0) is not a projective point"
        );
        if x2.is_zero() {
            return ProjPointQ {
                x1: BigInt::one(),
                x2: BigInt::zero(),
            };
        }
        let g = x1.gcd(&x2);
        let (mut a, mut b) = (x1 / &g, x2 / &g);
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        ProjPointQ { x1: a, x2: b }
    }

    pub fn infinity() -> Self {
        ProjPointQ {
            x1: BigInt::one(),
            x2: BigInt::zero(),
        }
    }

    pub fn from_rat(q: &Rat) -> Self {
        Self::new(q.numer().clone(), q.denom().clone())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigInt::from(n), BigInt::one())
    }

    pub fn is_infinity(&self) -> bool {
        self.x2.is_zero()
    }

    pub fn x1(&self) -> &BigInt {
        &self.x1
    }

    pub fn x2(&self) -> &BigInt {
        &self.x2
    }

    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_infinity() {
            None
        } else {
            Some(Rat::new(self.x1.clone(), self.x2.clone()))
        }
    }

    /// The chart swap x -> 1/x, sending 0 <-> infinity.
    pub fn invert(&self) -> Self {
        Self::new(self.x2.clone(), self.x1.clone())
    }

    /// Reduction to P^1(F_p): index in 0..p for the affine residue, p for
    /// the point at infinity. Well defined because gcd(x1, x2) = 1.
    pub fn reduce_mod(&self, p: u64) -> u64 {
        use num_traits::ToPrimitive;
        let pb = BigInt::from(p);
        let a = self.x1.mod_floor(&pb).to_u64().unwrap();
        let b = self.x2.mod_floor(&pb).to_u64().unwrap();
        if b == 0 {
            return p;
        }
        // p prime and p does not divide b, so Fermat inversion applies.
        let binv = crate::util::powmod(b, p - 2, p);
        crate::util::mulmod(a, binv, p)
    }

    /// "a/b", "a", or "inf".
    pub fn display_string(&self) -> String {
        if self.is_infinity() {
            "inf".to_string()
        } else if self.x2.is_one() {
            self.x1.to_string()
        } else {
            format!("{}/{}", self.x1, self.x2)
        }
    }

    /// Accepts what `display_string` produces.
    pub fn parse(s: &str) -> Option<Self> {
        if s == "inf" {
            return Some(Self::infinity());
        }
        parse_rat(s).map(|q| Self::from_rat(&q))
    }
}

impl fmt::Debug for ProjPointQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.x1, self.x2)
    }
}

impl fmt::Display for ProjPointQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat::rat;

    #[test]
    fn normalization() {
        let p = ProjPointQ::new(BigInt::from(-4), BigInt::from(-6));
        assert_eq!((p.x1().clone(), p.x2().clone()), (BigInt::from(2), BigInt::from(3)));
        let q = ProjPointQ::new(BigInt::from(3), BigInt::from(-1));
        assert_eq!((q.x1().clone(), q.x2().clone()), (BigInt::from(-3), BigInt::from(1)));
        let inf = ProjPointQ::new(BigInt::from(-7), BigInt::zero());
        assert!(inf.is_infinity());
        assert_eq!(inf.x1(), &BigInt::one());
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["inf", "2", "-1", "1/2", "-5/3"] {
            assert_eq!(ProjPointQ::parse(s).unwrap().display_string(), s);
        }
        assert_eq!(ProjPointQ::parse("2/4").unwrap().display_string(), "1/2");
    }

    #[test]
    fn reductions() {
        assert_eq!(ProjPointQ::from_rat(&rat(1, 2)).reduce_mod(2), 2);
        assert_eq!(ProjPointQ::from_rat(&rat(1, 2)).reduce_mod(5), 3);
        assert_eq!(ProjPointQ::infinity().reduce_mod(7), 7);
        assert_eq!(ProjPointQ::from_int(-1).reduce_mod(7), 6);
    }
}
