//! Number fields Q[x]/(G), factorization over them by the norm method, and
//! the exact abelian/nonabelian verdict for the splitting field of G.

use std::fmt;

use num_traits::{One, Zero};

use super::modp::{degree_multiset, is_squarefree_mod_p};
use super::overq::{factor_over_q, FactorError};
use crate::exactcore::poly::{lagrange_interpolate, IntPoly, QPoly};
use crate::exactcore::rat::Rat;
use crate::fp::FpCtx;
use crate::util::next_prime;

/// Q(theta) for a root theta of an irreducible G. Elements are QPoly of
/// degree < deg G, reduced against the monic form of G.
#[derive(Clone, Debug)]
pub struct NumberField {
    g_int: IntPoly,
    modulus: QPoly,
    n: usize,
}

impl NumberField {
    /// G must be irreducible over Q (the caller's contract, e.g. a factor
    /// from factor_over_q) and nonconstant.
    pub fn new(g: &IntPoly) -> Self {
        assert!(!g.is_zero() && g.deg() >= 1);
        let modulus = QPoly::from_int(g).monic();
        NumberField {
            g_int: g.clone(),
            modulus,
            n: g.deg(),
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn defining(&self) -> &IntPoly {
        &self.g_int
    }

    pub fn reduce(&self, a: &QPoly) -> QPoly {
        if a.is_zero() || a.deg() < self.n {
            a.clone()
        } else {
            a.divrem(&self.modulus).1
        }
    }

    pub fn mul(&self, a: &QPoly, b: &QPoly) -> QPoly {
        self.reduce(&a.mul(b))
    }

    /// Multiplicative inverse; panics on zero (the modulus is irreducible).
    pub fn inv(&self, a: &QPoly) -> QPoly {
        assert!(!a.is_zero(), "inverse of zero field element");
        // Extended Euclid in Q[x].
        let (mut r0, mut r1) = (self.modulus.clone(), self.reduce(a));
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let nt = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = nt;
        }
        assert!(r0.deg() == 0, "element not invertible: modulus reducible");
        let s = Rat::one() / r0.coeff(0);
        self.reduce(&t0.mul_scalar(&s))
    }

    /// a(b) reduced; used for composing root maps.
    pub fn compose_mod(&self, a: &QPoly, b: &QPoly) -> QPoly {
        if a.is_zero() {
            return QPoly::zero();
        }
        let mut acc = QPoly::zero();
        for i in (0..=a.deg()).rev() {
            acc = self.reduce(&acc.mul(b)).add(&QPoly::constant(a.coeff(i)));
        }
        self.reduce(&acc)
    }
}

/// Polynomial over a number field; coeffs[i] multiplies x^i and is reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct NfPoly {
    coeffs: Vec<QPoly>,
}

impl NfPoly {
    pub fn from_coeffs(mut coeffs: Vec<QPoly>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        NfPoly { coeffs }
    }

    pub fn from_rational(g: &IntPoly) -> Self {
        Self::from_coeffs(
            g.coeffs()
                .iter()
                .map(|c| QPoly::constant(Rat::from_integer(c.clone())))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        NfPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        NfPoly {
            coeffs: vec![QPoly::one()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> usize {
        assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> QPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(QPoly::zero)
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs
    }

    pub fn lc(&self) -> &QPoly {
        self.coeffs.last().expect("lc of zero")
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.lc().is_one()
    }

    fn sort_key(&self) -> (usize, Vec<Vec<Rat>>) {
        (
            self.coeffs.len(),
            self.coeffs.iter().map(|c| c.coeffs().to_vec()).collect(),
        )
    }
}

/// Elements print in parentheses with theta written as t: "x^2 + (t)*x + (t^2 - 2)".
impl fmt::Display for NfPoly {
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
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = format!("{}", c).replace('x', "t");
            let unit = cs == "1";
            match i {
                0 => write!(f, "({})", cs)?,
                1 => {
                    if unit {
                        write!(f, "x")?;
                    } else {
                        write!(f, "({})*x", cs)?;
                    }
                }
                _ => {
                    if unit {
                        write!(f, "x^{}", i)?;
                    } else {
                        write!(f, "({})*x^{}", cs, i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl NumberField {
    pub fn np_add(&self, a: &NfPoly, b: &NfPoly) -> NfPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        NfPoly::from_coeffs((0..n).map(|i| a.coeff(i).add(&b.coeff(i))).collect())
    }

    pub fn np_sub(&self, a: &NfPoly, b: &NfPoly) -> NfPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        NfPoly::from_coeffs((0..n).map(|i| a.coeff(i).sub(&b.coeff(i))).collect())
    }

    pub fn np_mul(&self, a: &NfPoly, b: &NfPoly) -> NfPoly {
        if a.is_zero() || b.is_zero() {
            return NfPoly::zero();
        }
        let mut out = vec![QPoly::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&self.mul(ai, bj));
            }
        }
        NfPoly::from_coeffs(out)
    }

    pub fn np_mul_elem(&self, a: &NfPoly, s: &QPoly) -> NfPoly {
        NfPoly::from_coeffs(a.coeffs.iter().map(|c| self.mul(c, s)).collect())
    }

    pub fn np_monic(&self, a: &NfPoly) -> NfPoly {
        if a.is_zero() || a.is_monic() {
            return a.clone();
        }
        let inv = self.inv(a.lc());
        self.np_mul_elem(a, &inv)
    }

    pub fn np_divrem(&self, a: &NfPoly, b: &NfPoly) -> (NfPoly, NfPoly) {
        assert!(!b.is_zero());
        if a.is_zero() || a.deg() < b.deg() {
            return (NfPoly::zero(), a.clone());
        }
        let db = b.deg();
        let inv_lc = self.inv(b.lc());
        let mut rem = a.coeffs.clone();
        let mut quo = vec![QPoly::zero(); a.deg() - db + 1];
        for k in (db..rem.len()).rev() {
            let c = self.mul(&rem[k], &inv_lc);
            if c.is_zero() {
                continue;
            }
            for i in 0..=db {
                let t = self.mul(&c, &b.coeffs[i]);
                rem[k - db + i] = rem[k - db + i].sub(&t);
            }
            quo[k - db] = c;
        }
        rem.truncate(db);
        (NfPoly::from_coeffs(quo), NfPoly::from_coeffs(rem))
    }

    /// Monic gcd in K[x].
    pub fn np_gcd(&self, a: &NfPoly, b: &NfPoly) -> NfPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.np_divrem(&x, &y).1;
            x = y;
            y = r;
        }
        self.np_monic(&x)
    }

    /// g(x + s*theta) as a polynomial over the field.
    pub fn np_shift_theta(&self, g: &IntPoly, s: i64) -> NfPoly {
        let theta_s = QPoly::from_coeffs(vec![Rat::zero(), Rat::from_integer(s.into())]);
        let shift = NfPoly::from_coeffs(vec![self.reduce(&theta_s), QPoly::one()]);
        let mut acc = NfPoly::zero();
        if g.is_zero() {
            return acc;
        }
        for i in (0..=g.deg()).rev() {
            acc = self.np_mul(&acc, &shift);
            let c = QPoly::constant(Rat::from_integer(g.coeff(i)));
            acc = self.np_add(&acc, &NfPoly::from_coeffs(vec![c]));
        }
        acc
    }
}

/// Norm of the shift: Res_y(G(y), h(x - s*y)), an integer polynomial of
/// degree (deg G)(deg h) for s != 0, computed by evaluation/interpolation.
fn norm_shifted(nf: &NumberField, h: &IntPoly, s: i64) -> IntPoly {
    let g = nf.defining();
    let n = nf.degree();
    let dh = h.deg();
    let samples = n * dh + 1;
    let mut points = Vec::with_capacity(samples);
    for k in 0..samples as i64 {
        // h(k - s*y) by Horner in the line (k - s*y).
        let line = IntPoly::from_i64(&[k, -s]);
        let mut acc = IntPoly::zero();
        for i in (0..=dh).rev() {
            acc = acc.mul(&line).add(&IntPoly::from_coeffs(vec![h.coeff(i)]));
        }
        let r = g.resultant_padded(&acc, n, dh);
        points.push((
            Rat::from_integer(k.into()),
            Rat::from_integer(r),
        ));
    }
    let interp = lagrange_interpolate(&points);
    interp.to_int().expect("integral norm polynomial")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationNf {
    pub unit: Rat,
    pub factors: Vec<(NfPoly, u32)>,
}

/// Norm-method factorization of a rational-coefficient polynomial over
/// Q[x]/(G): squarefree split over Q, shift until the norm is squarefree,
/// factor the norm over Q, pull factors back by gcd.
pub fn factor_over_nf(g: &IntPoly, nf: &NumberField) -> Result<FactorizationNf, FactorError> {
    assert!(!g.is_zero(), "factorization of the zero polynomial");
    let unit = Rat::from_integer(g.lc());
    if g.deg() == 0 {
        return Ok(FactorizationNf {
            unit: Rat::from_integer(g.coeff(0)),
            factors: vec![],
        });
    }
    let mut factors: Vec<(NfPoly, u32)> = Vec::new();
    for (h, e) in g.squarefree_decomposition() {
        for fac in trager(nf, &h)? {
            factors.push((fac, e));
        }
    }
    factors.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));

    // Product check against the input, exactly.
    let mut acc = NfPoly::from_coeffs(vec![QPoly::constant(unit.clone())]);
    for (fac, e) in &factors {
        for _ in 0..*e {
            acc = nf.np_mul(&acc, fac);
        }
    }
    assert!(
        acc == NfPoly::from_rational(g),
        "factor product mismatch over the field"
    );
    Ok(FactorizationNf { unit, factors })
}

/// h squarefree over Q (hence over the field). Monic irreducible factors.
fn trager(nf: &NumberField, h: &IntPoly) -> Result<Vec<NfPoly>, FactorError> {
    if h.deg() == 0 {
        return Ok(vec![]);
    }
    if nf.degree() == 1 {
        return Ok(factor_over_q(h)?
            .factors
            .into_iter()
            .map(|(f, _)| {
                let nfp = NfPoly::from_rational(&f);
                nf.np_monic(&nfp)
            })
            .collect());
    }
    if h.deg() == 1 {
        return Ok(vec![nf.np_monic(&NfPoly::from_rational(h))]);
    }
    // Shift search: s = 0, 1, -1, 2, -2, ...
    let mut s: i64 = 0;
    let (s, norm) = loop {
        let norm = norm_shifted(nf, h, s);
        if !norm.is_zero() && norm.deg() >= 1 && norm.squarefree_part() == norm.primitive_normalized()
        {
            break (s, norm);
        }
        s = if s > 0 { -s } else { -s + 1 };
    };
    let norm_factors = factor_over_q(&norm)?.factors;
    let a = NfPoly::from_rational(h);
    let mut out = Vec::with_capacity(norm_factors.len());
    for (ni, _) in &norm_factors {
        let shifted = nf.np_shift_theta(ni, s);
        let g = nf.np_gcd(&a, &shifted);
        if !g.is_zero() && g.deg() >= 1 {
            out.push(g);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaloisVerdict {
    Abelian { root_maps: Vec<QPoly> },
    NonAbelian { witness: NonAbelianWitness },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonAbelianWitness {
    NotNormal,
    NonCommutingPair { i: usize, j: usize },
    UnequalDegrees { p: u64, degrees: Vec<usize> },
}

impl GaloisVerdict {
    pub fn is_abelian(&self) -> bool {
        matches!(self, GaloisVerdict::Abelian { .. })
    }
}

/// Exact verdict for the splitting field of an irreducible G: normal with
/// commuting root maps, or a concrete obstruction.
pub fn is_abelian_galois(g: &IntPoly) -> Result<GaloisVerdict, FactorError> {
    assert!(!g.is_zero() && g.deg() >= 1);
    if g.deg() == 1 {
        return Ok(GaloisVerdict::Abelian {
            root_maps: vec![QPoly::from_coeffs(vec![Rat::zero(), Rat::one()])],
        });
    }
    let nf = NumberField::new(g);
    let fac = factor_over_nf(g, &nf)?;
    if fac.factors.iter().any(|(f, _)| f.deg() >= 2) {
        return Ok(GaloisVerdict::NonAbelian {
            witness: NonAbelianWitness::NotNormal,
        });
    }
    // Roots of the monic linear factors x + c are -c.
    let mut root_maps: Vec<QPoly> = fac
        .factors
        .iter()
        .map(|(f, _)| f.coeff(0).neg())
        .collect();
    root_maps.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    assert_eq!(root_maps.len(), nf.degree(), "split count below field degree");
    for i in 0..root_maps.len() {
        for j in i + 1..root_maps.len() {
            let ij = nf.compose_mod(&root_maps[i], &root_maps[j]);
            let ji = nf.compose_mod(&root_maps[j], &root_maps[i]);
            if ij != ji {
                return Ok(GaloisVerdict::NonAbelian {
                    witness: NonAbelianWitness::NonCommutingPair { i, j },
                });
            }
        }
    }
    Ok(GaloisVerdict::Abelian { root_maps })
}

/// Smallest unramified p <= pmax where G factors with unequal degrees mod p.
/// Such a prime refutes an abelian splitting field.
pub fn unequal_degree_witness(g: &IntPoly, pmax: u64) -> Option<(u64, Vec<usize>)> {
    assert!(!g.is_zero() && g.deg() >= 1);
    let bad = g.lc() * g.disc_resultant();
    assert!(!bad.is_zero(), "input must be squarefree");
    let mut p = 2u64;
    while p <= pmax {
        if !(&bad % num_bigint::BigInt::from(p)).is_zero() {
            let ctx = FpCtx::new(p);
            let red = ctx.reduce_poly(g);
            debug_assert!(red.deg() == g.deg() && is_squarefree_mod_p(&ctx, &red));
            let degs = degree_multiset(&ctx, &red);
            if degs.windows(2).any(|w| w[0] != w[1]) {
                return Some((p, degs));
            }
        }
        p = next_prime(p);
    }
    None
}
