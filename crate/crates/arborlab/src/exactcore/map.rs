//! Rational maps on P^1 over Q in normalized integer form.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use super::point::ProjPointQ;
use super::poly::{IntPoly, QPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("map degree {0} is below 2")]
    DegreeTooLow(usize),
    #[error("degenerate map: {0}")]
    Degenerate(String),
}

/// f = p/q with p, q in Z[x]: gcd(p, q) = 1, joint content 1, and the
/// highest-index nonzero coefficient of q positive (of p when q = 0 is
/// impossible; q = constant covers polynomials). Degree = max(deg p, deg q) >= 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    p: IntPoly,
    q: IntPoly,
    d: usize,
}

impl RationalMap {
    pub fn new(p_raw: &IntPoly, q_raw: &IntPoly) -> Result<Self, MapError> {
        if q_raw.is_zero() {
            return Err(MapError::Degenerate("zero denominator".into()));
        }
        if p_raw.is_zero() {
            return Err(MapError::Degenerate("constant map".into()));
        }
        let mut p = p_raw.clone();
        let mut q = q_raw.clone();
        // Shared factors reduce away silently.
        let g = p.gcd(&q);
        if g.deg() > 0 {
            p = p.div_exact(&g).expect("gcd divides");
            q = q.div_exact(&g).expect("gcd divides");
        }
        // Joint content 1.
        use num_integer::Integer;
        let c = p.content().gcd(&q.content());
        if !c.is_one() {
            p = p.div_scalar_exact(&c);
            q = q.div_scalar_exact(&c);
        }
        // Sign: leading coefficient of q positive.
        if q.lc().is_negative() {
            p = p.neg();
            q = q.neg();
        }
        let d = p.deg().max(q.deg());
        if d == 0 {
            return Err(MapError::Degenerate("constant map".into()));
        }
        if d < 2 {
            return Err(MapError::DegreeTooLow(d));
        }
        Ok(RationalMap { p, q, d })
    }

    pub fn from_qpolys(pn: &QPoly, qn: &QPoly) -> Result<Self, MapError> {
        if qn.is_zero() {
            return Err(MapError::Degenerate("zero denominator".into()));
        }
        if pn.is_zero() {
            return Err(MapError::Degenerate("constant map".into()));
        }
        // Scale both by the same factor so the quotient is unchanged.
        let (pi, sp) = pn.clear_denominators_scaled();
        let (qi, sq) = qn.clear_denominators_scaled();
        // pn = pi/sp, qn = qi/sq => f = (pi * sq) / (qi * sp) with both scales > 0.
        let p = pi.mul_scalar(sq.numer()).mul_scalar(sp.denom());
        let q = qi.mul_scalar(sp.numer()).mul_scalar(sq.denom());
        Self::new(&p, &q)
    }

    pub fn from_poly(p: &IntPoly) -> Result<Self, MapError> {
        Self::new(p, &IntPoly::one())
    }

    pub fn p(&self) -> &IntPoly {
        &self.p
    }

    pub fn q(&self) -> &IntPoly {
        &self.q
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn is_polynomial(&self) -> bool {
        self.q.deg() == 0
    }

    /// Homogeneous coefficient vectors of length d+1: F(X, Z) = Z^d p(X/Z), G likewise.
    pub fn homog_p(&self) -> Vec<BigInt> {
        (0..=self.d).map(|i| self.p.coeff(i)).collect()
    }

    pub fn homog_q(&self) -> Vec<BigInt> {
        (0..=self.d).map(|i| self.q.coeff(i)).collect()
    }

    /// Res(F, G) for the degree-d homogenizations; nonzero by coprimality.
    pub fn homogeneous_resultant(&self) -> BigInt {
        self.p.resultant_padded(&self.q, self.d, self.d)
    }

    pub fn eval(&self, a: &ProjPointQ) -> ProjPointQ {
        let x1 = self.p.eval_homog(a.x1(), a.x2(), self.d);
        let x2 = self.q.eval_homog(a.x1(), a.x2(), self.d);
        // (F : G) vanishes jointly only on Res = 0.
        ProjPointQ::new(x1, x2)
    }

    /// Image of the point at infinity: (p_d : q_d) in the padded coefficients.
    pub fn eval_infinity(&self) -> ProjPointQ {
        ProjPointQ::new(self.p.coeff(self.d), self.q.coeff(self.d))
    }

    /// f(g(x)) as a normalized map of degree deg f * deg g.
    pub fn compose(&self, other: &Self) -> Self {
        let d = self.d;
        let r = &other.p;
        let s = &other.q;
        // Horner in r/s: N = sum p_i r^i s^(d-i), D likewise with q.
        let mut rpow = IntPoly::one();
        let mut spows: Vec<IntPoly> = Vec::with_capacity(d + 1);
        spows.push(IntPoly::one());
        for i in 1..=d {
            spows.push(spows[i - 1].mul(s));
        }
        let mut num = IntPoly::zero();
        let mut den = IntPoly::zero();
        for i in 0..=d {
            let term = rpow.mul(&spows[d - i]);
            num = num.add(&term.mul_scalar(&self.p.coeff(i)));
            den = den.add(&term.mul_scalar(&self.q.coeff(i)));
            if i < d {
                rpow = rpow.mul(r);
            }
        }
        // Degree is exactly d * deg(other): the homogenized pullback of
        // coprime forms along a nonconstant map stays coprime.
        Self::new(&num, &den).expect("composition of maps of degree >= 2")
    }

    /// n-fold iterate, n >= 1.
    pub fn iterate(&self, n: u32) -> Self {
        assert!(n >= 1);
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose(self);
        }
        acc
    }

    /// p'q - pq'; finite critical points are its roots, ord_c = e_c - 1.
    pub fn wronskian(&self) -> IntPoly {
        self.p.derivative().mul(&self.q).sub(&self.p.mul(&self.q.derivative()))
    }

    /// Multiplicity of infinity as a critical point: 2d - 2 - deg W.
    pub fn infinity_crit_multiplicity(&self) -> u32 {
        let w = self.wronskian();
        debug_assert!(!w.is_zero(), "degree >= 2 maps are separable over Q");
        (2 * self.d - 2 - w.deg()) as u32
    }

    /// The conjugate (1/x) o f o (1/x) = rev(q)/rev(p); moves infinity to 0.
    pub fn conj_by_inversion(&self) -> Self {
        let rp = self.p.reverse_at(self.d);
        let rq = self.q.reverse_at(self.d);
        Self::new(&rq, &rp).expect("inversion preserves degree")
    }

    pub fn canonical_string(&self) -> String {
        format!("({})/({})", self.p, self.q)
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_one() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}", self.canonical_string())
        }
    }
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMap[{}]", self.canonical_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat::rat;

    fn m(p: &[i64], q: &[i64]) -> RationalMap {
        RationalMap::new(&IntPoly::from_i64(p), &IntPoly::from_i64(q)).unwrap()
    }

    #[test]
    fn normalization() {
        // (2x^2 + 2)/2 -> x^2 + 1 over denominator 1.
        let f = m(&[2, 0, 2], &[2]);
        assert_eq!(f.canonical_string(), "(x^2 + 1)/(1)");
        // Sign pinned by lc(q) > 0.
        let g = m(&[0, 0, 1], &[-1]);
        assert_eq!(g.canonical_string(), "(-x^2)/(1)");
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn common_factor_reduces() {
        // (x^3 + x)/(x) -> x^2 + 1.
        let f = m(&[0, 1, 0, 1], &[0, 1]);
        assert_eq!(f, m(&[1, 0, 1], &[1]));
    }

    #[test]
    fn eval_points() {
        let f = m(&[1, 0, 1], &[1]); // x^2 + 1
        let a = ProjPointQ::from_rat(&rat(1, 2));
        assert_eq!(f.eval(&a), ProjPointQ::from_rat(&rat(5, 4)));
        assert_eq!(f.eval(&ProjPointQ::infinity()), ProjPointQ::infinity());
        let inv = m(&[1], &[0, 0, 1]); // 1/x^2
        assert_eq!(inv.eval(&ProjPointQ::infinity()), ProjPointQ::from_int(0));
        assert_eq!(inv.eval(&ProjPointQ::from_int(0)), ProjPointQ::infinity());
    }

    #[test]
    fn iteration_degree_and_values() {
        let f = m(&[1, 0, 1], &[1]);
        let f2 = f.iterate(2);
        assert_eq!(f2.degree(), 4);
        // (x^2+1)^2 + 1 at x = 1 is 5.
        assert_eq!(f2.eval(&ProjPointQ::from_int(1)), ProjPointQ::from_int(5));
        let g = m(&[1], &[0, 0, 1]); // 1/x^2: second iterate is x^4
        let g2 = g.iterate(2);
        assert_eq!(g2.canonical_string(), "(x^4)/(1)");
    }

    #[test]
    fn wronskian_and_infinity() {
        let f = m(&[1, 0, 1], &[1]); // W = 2x; infinity has multiplicity 1
        assert_eq!(f.wronskian().to_string(), "2*x");
        assert_eq!(f.infinity_crit_multiplicity(), 1);
        let c = m(&[0, 1], &[1, 0, 1]); // x/(x^2+1): W = 1 - x^2, no infinity
        assert_eq!(c.infinity_crit_multiplicity(), 0);
    }

    #[test]
    fn inversion_conjugate() {
        let f = m(&[1, 0, 1], &[1]); // x^2 + 1 -> x^2/(x^2 + 1)
        let g = f.conj_by_inversion();
        assert_eq!(g.canonical_string(), "(x^2)/(x^2 + 1)");
        // Conjugation commutes with evaluation through 1/x.
        let one = crate::exactcore::rat::rat_int(1);
        let a = rat(2, 3);
        let fa = f.eval(&ProjPointQ::from_rat(&a));
        let ga = g.eval(&ProjPointQ::from_rat(&(one.clone() / a.clone())));
        assert_eq!(ga.to_rat().unwrap() * fa.to_rat().unwrap(), one);
    }

    #[test]
    fn resultant_matches_known_maps() {
        // Monic polynomials have unit resultant: good reduction everywhere.
        assert_eq!(m(&[1, 0, 1], &[1]).homogeneous_resultant(), BigInt::from(1));
        assert_eq!(m(&[-3, 0, 1], &[1]).homogeneous_resultant(), BigInt::from(1));
        // x^2/2: Res(X^2, 2Z^2) = 4, bad reduction only at 2.
        assert_eq!(m(&[0, 0, 1], &[2]).homogeneous_resultant(), BigInt::from(4));
        // x/(x^2+1): Res(XZ, X^2+Z^2) is a unit, good everywhere.
        let c = m(&[0, 1], &[1, 0, 1]).homogeneous_resultant();
        assert_eq!(c.magnitude().to_string(), "1");
    }
}
