//! Arithmetic in F_p and dense polynomials over F_p for prime p < 2^63.
//!
//! All polynomial operations go through an FpCtx so the modulus is fixed in
//! one place; coefficients are kept reduced to [0, p).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::exactcore::poly::IntPoly;
use crate::util::{mulmod, powmod};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpCtx {
    pub p: u64,
}

/// Coefficients ascending, reduced mod p, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FpPoly {
    c: Vec<u64>,
}

impl FpPoly {
    pub fn from_vec(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { c }
    }

    pub fn zero() -> Self {
        FpPoly { c: vec![] }
    }

    pub fn one() -> Self {
        FpPoly { c: vec![1] }
    }

    pub fn x() -> Self {
        FpPoly { c: vec![0, 1] }
    }

    pub fn constant(a: u64) -> Self {
        Self::from_vec(vec![a])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn deg(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.c.len() - 1
    }

    pub fn lc(&self) -> u64 {
        *self.c.last().expect("lc of the zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
}

impl FpCtx {
    pub fn new(p: u64) -> Self {
        debug_assert!(crate::util::is_prime(p), "modulus must be prime");
        assert!(p < (1 << 63));
        FpCtx { p }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        powmod(a, e, self.p)
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero mod {}", self.p);
        powmod(a, self.p - 2, self.p)
    }

    pub fn reduce_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    pub fn reduce_poly(&self, f: &IntPoly) -> FpPoly {
        FpPoly::from_vec(f.coeffs().iter().map(|c| self.reduce_bigint(c)).collect())
    }

    pub fn padd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.c.len().max(b.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.add(a.coeff(i), b.coeff(i)));
        }
        FpPoly::from_vec(out)
    }

    pub fn psub(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.c.len().max(b.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.sub(a.coeff(i), b.coeff(i)));
        }
        FpPoly::from_vec(out)
    }

    pub fn pmul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        if a.is_zero() || b.is_zero() {
            return FpPoly::zero();
        }
        let mut out = vec![0u64; a.c.len() + b.c.len() - 1];
        if self.p < (1 << 32) {
            // Products fit in u64^2 / accumulate in u128 without overflow.
            for (i, &ai) in a.c.iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                for (j, &bj) in b.c.iter().enumerate() {
                    let t = (out[i + j] as u128 + (ai as u128) * (bj as u128)) % self.p as u128;
                    out[i + j] = t as u64;
                }
            }
        } else {
            for (i, &ai) in a.c.iter().enumerate() {
                for (j, &bj) in b.c.iter().enumerate() {
                    out[i + j] = self.add(out[i + j], self.mul(ai, bj));
                }
            }
        }
        FpPoly::from_vec(out)
    }

    pub fn pmul_scalar(&self, a: &FpPoly, s: u64) -> FpPoly {
        FpPoly::from_vec(a.c.iter().map(|&c| self.mul(c, s)).collect())
    }

    /// (quotient, remainder) with deg r < deg b.
    pub fn pdivrem(&self, a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!b.is_zero(), "division by zero polynomial");
        if a.is_zero() || a.deg() < b.deg() {
            return (FpPoly::zero(), a.clone());
        }
        let db = b.deg();
        let inv_lc = self.inv(b.lc());
        let mut rem = a.c.clone();
        let mut quo = vec![0u64; a.deg() - db + 1];
        for k in (db..rem.len()).rev() {
            let c = self.mul(rem[k], inv_lc);
            if c == 0 {
                continue;
            }
            quo[k - db] = c;
            for i in 0..=db {
                let t = self.mul(c, b.c[i]);
                rem[k - db + i] = self.sub(rem[k - db + i], t);
            }
        }
        rem.truncate(db);
        (FpPoly::from_vec(quo), FpPoly::from_vec(rem))
    }

    pub fn prem(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        self.pdivrem(a, b).1
    }

    pub fn pmonic(&self, a: &FpPoly) -> FpPoly {
        if a.is_zero() || a.lc() == 1 {
            return a.clone();
        }
        self.pmul_scalar(a, self.inv(a.lc()))
    }

    /// Monic gcd.
    pub fn pgcd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.prem(&x, &y);
            x = y;
            y = r;
        }
        self.pmonic(&x)
    }

    pub fn pderivative(&self, a: &FpPoly) -> FpPoly {
        if a.is_zero() || a.deg() == 0 {
            return FpPoly::zero();
        }
        let mut out = Vec::with_capacity(a.c.len() - 1);
        for i in 1..a.c.len() {
            out.push(self.mul(a.c[i], (i as u64) % self.p));
        }
        FpPoly::from_vec(out)
    }

    pub fn peval(&self, a: &FpPoly, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in a.c.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }

    /// base^e mod m by binary exponentiation over the bits of e.
    pub fn ppowmod(&self, base: &FpPoly, e: &BigUint, m: &FpPoly) -> FpPoly {
        assert!(!m.is_zero() && m.deg() >= 1);
        let mut result = FpPoly::one();
        let mut b = self.prem(base, m);
        for i in 0..e.bits() {
            if e.bit(i) {
                result = self.prem(&self.pmul(&result, &b), m);
            }
            if i + 1 < e.bits() {
                b = self.prem(&self.pmul(&b, &b), m);
            }
        }
        result
    }

    /// a(b) mod m.
    pub fn pcompose_mod(&self, a: &FpPoly, b: &FpPoly, m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::zero();
        for &c in a.c.iter().rev() {
            acc = self.prem(&self.pmul(&acc, b), m);
            acc = self.padd(&acc, &FpPoly::constant(c));
        }
        acc
    }
}
