//! Dense polynomials over Z and Q with the exact kernels the rest of the
//! crate leans on: primitive-PRS gcd, Yun squarefree splitting, padded
//! Sylvester resultants, and Lagrange interpolation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rat::Rat;
use crate::util::{bareiss_det, ln_big};

/// Integer polynomial, dense, no trailing zero coefficients.
/// `coeffs[i]` is the coefficient of x^i; empty means the zero polynomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// b*x - a; vanishes at a/b.
    pub fn linear_from_root(a: &BigInt, b: &BigInt) -> Self {
        Self::from_coeffs(vec![-a.clone(), b.clone()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; panics on the zero polynomial.
    pub fn deg(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn mul_scalar(&self, s: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul_xk(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Nonnegative gcd of the coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by s; s must divide the content.
    pub fn div_scalar_exact(&self, s: &BigInt) -> Self {
        debug_assert!(!s.is_zero());
        Self::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(s);
                    debug_assert!(r.is_zero());
                    q
                })
                .collect(),
        )
    }

    /// Content removed, original sign of the leading coefficient kept.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let c = self.content();
        Self::from_coeffs(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Content removed and leading coefficient made positive.
    pub fn primitive_normalized(&self) -> Self {
        let p = self.primitive_part();
        if p.lc().is_negative() {
            p.neg()
        } else {
            p
        }
    }

    pub fn eval_big(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rat::from_integer(c.clone());
        }
        acc
    }

    /// Homogeneous evaluation at formal degree `d`: sum c_i x1^i x2^(d-i).
    /// Requires deg <= d.
    pub fn eval_homog(&self, x1: &BigInt, x2: &BigInt, d: usize) -> BigInt {
        assert!(self.is_zero() || self.deg() <= d);
        let mut pow1 = vec![BigInt::one()];
        let mut pow2 = vec![BigInt::one()];
        for i in 1..=d {
            pow1.push(&pow1[i - 1] * x1);
            pow2.push(&pow2[i - 1] * x2);
        }
        let mut acc = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * &pow1[i] * &pow2[d - i];
            }
        }
        acc
    }

    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// x^d * p(1/x): coefficient reversal at formal degree `d` (deg <= d).
    pub fn reverse_at(&self, d: usize) -> Self {
        let mut out = vec![BigInt::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[d - i] = c.clone();
        }
        Self::from_coeffs(out)
    }

    pub fn shift(&self, t: &BigInt) -> Self {
        // p(x + t) by Horner on the coefficient list.
        self.compose(&Self::from_coeffs(vec![t.clone(), BigInt::one()]))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn l2_norm_log(&self) -> f64 {
        let s: BigInt = self.coeffs.iter().map(|c| c * c).sum();
        ln_big(&s) / 2.0
    }

    /// Pseudo-remainder: lc(b)^(da-db+1) * a mod b, with da >= db.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        assert!(!b.is_zero());
        let mut r = self.clone();
        let db = b.deg();
        let lb = b.lc();
        while !r.is_zero() && r.deg() >= db {
            let dr = r.deg();
            let shift = b.mul_xk(dr - db).mul_scalar(&r.lc());
            r = r.mul_scalar(&lb).sub(&shift);
            if !r.is_zero() && r.deg() >= dr {
                // The leading term must cancel each round.
                unreachable!("pseudo-division failed to reduce degree");
            }
        }
        r
    }

    /// gcd over Q represented by the primitive integer polynomial with
    /// positive leading coefficient (primitive PRS).
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_normalized();
        }
        if other.is_zero() {
            return self.primitive_normalized();
        }
        let (mut a, mut b) = if self.deg() >= other.deg() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_normalized()
    }

    /// Exact division over Q; Some(q) iff `other` divides self with rational
    /// quotient that clears to these integer coefficients.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        assert!(!other.is_zero());
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.deg() < other.deg() {
            return None;
        }
        let (q, r) = QPoly::from_int(self).divrem(&QPoly::from_int(other));
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    /// Squarefree part over Q (primitive, positive leading coefficient).
    pub fn squarefree_part(&self) -> Self {
        assert!(!self.is_zero());
        if self.deg() == 0 {
            return Self::one();
        }
        let g = self.gcd(&self.derivative());
        if g.deg() == 0 {
            return self.primitive_normalized();
        }
        self.primitive_normalized()
            .div_exact(&g)
            .expect("gcd divides")
            .primitive_normalized()
    }

    /// Yun's squarefree decomposition over Q. Returns (factor, multiplicity)
    /// with factors primitive, positive leading coefficient, pairwise coprime,
    /// and content/sign dropped.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, u32)> {
        assert!(!self.is_zero());
        let f = self.primitive_normalized();
        if f.deg() == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut out = Vec::new();
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = df.div_exact(&a0).expect("gcd divides");
        let mut i = 1u32;
        loop {
            let d = c.sub(&b.derivative());
            if d.is_zero() {
                if b.deg() >= 1 {
                    out.push((b.primitive_normalized(), i));
                }
                break;
            }
            let a = b.gcd(&d);
            if a.deg() >= 1 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            i += 1;
            if b.deg() == 0 {
                break;
            }
        }
        out
    }

    /// Resultant at the stated formal degrees (coefficients padded with
    /// zeros). With da = deg a and db = deg b this is the classical
    /// resultant; padded it is the resultant of the degree-(da, db) forms.
    pub fn resultant_padded(&self, other: &Self, da: usize, db: usize) -> BigInt {
        assert!(self.is_zero() || self.deg() <= da);
        assert!(other.is_zero() || other.deg() <= db);
        if da == 0 && db == 0 {
            return BigInt::one();
        }
        let n = da + db;
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for row in 0..db {
            for i in 0..=da {
                m[row][row + da - i] = self.coeff(i);
            }
        }
        for row in 0..da {
            for i in 0..=db {
                m[db + row][row + db - i] = other.coeff(i);
            }
        }
        bareiss_det(m)
    }

    pub fn resultant(&self, other: &Self) -> BigInt {
        assert!(!self.is_zero() && !other.is_zero());
        self.resultant_padded(other, self.deg(), other.deg())
    }

    /// Res(f, f') up to the leading-coefficient unit; zero iff f has a
    /// repeated root. Sufficient for ramification tests.
    pub fn disc_resultant(&self) -> BigInt {
        let d = self.derivative();
        if d.is_zero() {
            return BigInt::zero();
        }
        self.resultant(&d)
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Canonical descending-degree form, e.g. "x^4 - 4*x^2 + 2".
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            match (i, unit) {
                (0, _) => write!(f, "{}", mag)?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{}*x", mag)?,
                (_, true) => write!(f, "x^{}", i)?,
                (_, false) => write!(f, "{}*x^{}", mag, i)?,
            }
        }
        Ok(())
    }
}

/// Rational-coefficient polynomial, dense, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_int(p: &IntPoly) -> Self {
        Self::from_coeffs(
            p.coeffs()
                .iter()
                .map(|c| Rat::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn deg(&self) -> usize {
        assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn lc(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn mul_scalar(&self, s: &Rat) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn divrem(&self, other: &Self) -> (Self, Self) {
        assert!(!other.is_zero());
        let db = other.deg();
        let lb = other.lc();
        let mut r = self.clone();
        let mut q = vec![Rat::zero(); self.coeffs.len().saturating_sub(db)];
        while !r.is_zero() && r.deg() >= db {
            let dr = r.deg();
            let c = r.lc() / lb.clone();
            q[dr - db] = c.clone();
            let mut sub = other.mul_scalar(&c).coeffs;
            let mut padded = vec![Rat::zero(); dr - db];
            padded.append(&mut sub);
            r = r.sub(&Self::from_coeffs(padded));
        }
        (Self::from_coeffs(q), r)
    }

    pub fn monic(&self) -> Self {
        assert!(!self.is_zero());
        let inv = Rat::one() / self.lc();
        self.mul_scalar(&inv)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn gcd_monic(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Integer polynomial with the same coefficients, or None if any
    /// denominator is nontrivial.
    pub fn to_int(&self) -> Option<IntPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.denom().is_one() {
                return None;
            }
            out.push(c.numer().clone());
        }
        Some(IntPoly::from_coeffs(out))
    }

    /// Primitive integer polynomial proportional to self (lc sign kept).
    pub fn clear_denominators(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        IntPoly::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| c.numer() * (&lcm / c.denom()))
                .collect(),
        )
        .primitive_part()
    }

    /// (g, s) with self = g / s, g primitive integral and s > 0 rational.
    pub fn clear_denominators_scaled(&self) -> (IntPoly, Rat) {
        if self.is_zero() {
            return (IntPoly::zero(), Rat::one());
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let scaled = IntPoly::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| c.numer() * (&lcm / c.denom()))
                .collect(),
        );
        // self * lcm = scaled = content * g, so self = g * content / lcm.
        let content = scaled.content();
        (scaled.div_scalar_exact(&content), Rat::new(lcm, content))
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Same canonical shape as IntPoly, with coefficients printed as "a/b".
impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use super::rat::rat_string;
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = rat_string(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag == "1";
            match i {
                0 => write!(f, "{}", mag)?,
                1 => {
                    if unit {
                        write!(f, "x")?;
                    } else {
                        write!(f, "{}*x", mag)?;
                    }
                }
                _ => {
                    if unit {
                        write!(f, "x^{}", i)?;
                    } else {
                        write!(f, "{}*x^{}", mag, i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Unique interpolating polynomial of degree < points.len().
pub fn lagrange_interpolate(points: &[(Rat, Rat)]) -> QPoly {
    // Newton's divided differences; exact over Q.
    let n = points.len();
    assert!(n > 0);
    let xs: Vec<Rat> = points.iter().map(|p| p.0.clone()).collect();
    let mut coef: Vec<Rat> = points.iter().map(|p| p.1.clone()).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = coef[i].clone() - coef[i - 1].clone();
            let den = xs[i].clone() - xs[i - j].clone();
            coef[i] = num / den;
        }
    }
    let mut acc = QPoly::zero();
    for i in (0..n).rev() {
        let shift = QPoly::from_coeffs(vec![-xs[i].clone(), Rat::one()]);
        acc = acc.mul(&shift).add(&QPoly::constant(coef[i].clone()));
    }
    acc
}
