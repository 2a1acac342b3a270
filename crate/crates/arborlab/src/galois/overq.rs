//! Factorization in Q[x]: Yun, then modular factorization with quadratic
//! Hensel lifting and subset recombination. Every run is deterministic, and
//! the factor product is re-checked against the input before returning.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::cache;
use super::modp::{factor_mod_p, is_squarefree_mod_p};
use crate::exactcore::poly::{IntPoly, QPoly};
use crate::exactcore::rat::Rat;
use crate::fp::FpCtx;
use crate::util::next_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("factorization budget exhausted after {steps} recombination steps")]
    Timeout { steps: u64 },
}

/// f = unit * prod factors[i].0 ^ factors[i].1 with primitive irreducible
/// factors of positive leading coefficient, sorted by (degree, coefficients).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationQ {
    pub unit: Rat,
    pub factors: Vec<(IntPoly, u32)>,
}

impl FactorizationQ {
    pub fn product(&self) -> QPoly {
        let mut acc = QPoly::constant(self.unit.clone());
        for (g, e) in &self.factors {
            let gq = QPoly::from_int(g);
            for _ in 0..*e {
                acc = acc.mul(&gq);
            }
        }
        acc
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

const RECOMBINE_STEP_CAP: u64 = 1_000_000;
const CANDIDATE_PRIMES: usize = 5;

pub fn factor_over_q(f: &IntPoly) -> Result<FactorizationQ, FactorError> {
    assert!(!f.is_zero(), "factorization of the zero polynomial");
    if f.deg() == 0 {
        return Ok(FactorizationQ {
            unit: Rat::from_integer(f.coeff(0)),
            factors: vec![],
        });
    }
    let pp = f.primitive_normalized();
    let mut unit = Rat::from_integer(f.content());
    if f.lc().is_negative() {
        unit = -unit;
    }

    let factors = match cache::load_factors(&pp).filter(|fs| product_is(&pp, fs)) {
        Some(fs) => fs,
        None => {
            let mut fs: Vec<(IntPoly, u32)> = Vec::new();
            for (h, e) in pp.squarefree_decomposition() {
                for g in factor_squarefree(&h)? {
                    fs.push((g, e));
                }
            }
            fs.sort_by(|a, b| (a.0.deg(), a.0.coeffs()).cmp(&(b.0.deg(), b.0.coeffs())));
            assert!(product_is(&pp, &fs), "factor product mismatch");
            cache::store_factors(&pp, &fs);
            fs
        }
    };
    Ok(FactorizationQ { unit, factors })
}

pub fn factor_qpoly(f: &QPoly) -> Result<FactorizationQ, FactorError> {
    assert!(!f.is_zero());
    let (g, s) = f.clear_denominators_scaled();
    let mut out = factor_over_q(&g)?;
    out.unit /= s;
    Ok(out)
}

fn product_is(pp: &IntPoly, fs: &[(IntPoly, u32)]) -> bool {
    let mut acc = IntPoly::one();
    for (g, e) in fs {
        if g.is_zero() || g.deg() == 0 {
            return false;
        }
        for _ in 0..*e {
            acc = acc.mul(g);
        }
    }
    acc == *pp
}

/// h primitive squarefree with positive leading coefficient, degree >= 1.
/// Returns the primitive irreducible factors, each with positive lc.
fn factor_squarefree(h: &IntPoly) -> Result<Vec<IntPoly>, FactorError> {
    if h.deg() == 1 {
        return Ok(vec![h.clone()]);
    }
    // Strip a root at zero first so constant-term pretests stay meaningful.
    if h.coeff(0).is_zero() {
        let x = IntPoly::from_i64(&[0, 1]);
        let mut rest = factor_squarefree(&h.div_exact(&x).expect("x divides"))?;
        rest.insert(0, x);
        return Ok(rest);
    }

    // Monicize: H(y) = lc^(n-1) h(y/lc) is monic with integer coefficients.
    let n = h.deg();
    let lc = h.lc();
    let hh = monicize(h);

    // Prime selection: fewest distinct-degree pieces among a few squarefree
    // reductions; a single piece certifies irreducibility outright.
    let mut best: Option<(u64, usize)> = None;
    let mut p = 2u64;
    let mut seen = 0usize;
    while seen < CANDIDATE_PRIMES {
        let ctx = FpCtx::new(p);
        let red = ctx.reduce_poly(&hh);
        if !red.is_zero() && red.deg() == n && is_squarefree_mod_p(&ctx, &red) {
            seen += 1;
            let pieces: usize = factor_mod_p(&ctx, &red).len();
            if pieces == 1 {
                return Ok(vec![h.clone()]);
            }
            if best.map_or(true, |(_, b)| pieces < b) {
                best = Some((p, pieces));
            }
        }
        p = next_prime(p);
    }
    let (p, _) = best.unwrap();

    let ctx = FpCtx::new(p);
    let modular: Vec<IntPoly> = factor_mod_p(&ctx, &ctx.reduce_poly(&hh))
        .into_iter()
        .map(|(g, e)| {
            debug_assert_eq!(e, 1);
            IntPoly::from_coeffs(g.coeffs().iter().map(|&c| BigInt::from(c)).collect())
        })
        .collect();

    // Need the modulus beyond twice the Mignotte bound 2^n * |H|_2 so factor
    // coefficients are recovered exactly from their symmetric residues.
    let norm2: BigInt = hh.coeffs().iter().map(|c| c * c).sum();
    let mig = (BigInt::one() << n) * (norm2.sqrt() + 1);
    let target = &mig * 2 + 1;
    let mut modulus = BigInt::from(p);
    while modulus < target {
        modulus = &modulus * &modulus;
    }

    let lifted = hensel_tree(&hh, &modular, p, &modulus);
    let factors_h = recombine(&hh, lifted, &modulus)?;

    // Undo the monicization.
    Ok(factors_h
        .into_iter()
        .map(|g| substitute_scaled(&g, &lc).primitive_normalized())
        .collect())
}

/// lc^(n-1) h(y/lc) for n = deg h: monic, integral, coefficient i scaled
/// by lc^(n-1-i).
fn monicize(h: &IntPoly) -> IntPoly {
    let n = h.deg();
    let lc = h.lc();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut pw = BigInt::one();
    for i in (0..n).rev() {
        coeffs[i] = h.coeff(i) * &pw;
        pw *= &lc;
    }
    IntPoly::from_coeffs(coeffs)
}

/// g(lc * x).
fn substitute_scaled(g: &IntPoly, lc: &BigInt) -> IntPoly {
    let mut pw = BigInt::one();
    let mut coeffs = Vec::with_capacity(g.coeffs().len());
    for c in g.coeffs() {
        coeffs.push(c * &pw);
        pw *= lc;
    }
    IntPoly::from_coeffs(coeffs)
}

// --- arithmetic on polynomials with coefficients in Z/m ---

fn zred(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::from_coeffs(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn zmul(a: &IntPoly, b: &IntPoly, m: &BigInt) -> IntPoly {
    zred(&a.mul(b), m)
}

fn zsub(a: &IntPoly, b: &IntPoly, m: &BigInt) -> IntPoly {
    zred(&a.sub(b), m)
}

fn zadd(a: &IntPoly, b: &IntPoly, m: &BigInt) -> IntPoly {
    zred(&a.add(b), m)
}

/// Division by a monic divisor over Z/m.
fn zdivrem_monic(a: &IntPoly, b: &IntPoly, m: &BigInt) -> (IntPoly, IntPoly) {
    debug_assert!(b.lc().is_one());
    let db = b.deg();
    let mut rem: Vec<BigInt> = a.coeffs().to_vec();
    if rem.len() <= db {
        return (IntPoly::zero(), a.clone());
    }
    let mut quo = vec![BigInt::zero(); rem.len() - db];
    for k in (db..rem.len()).rev() {
        let c = rem[k].mod_floor(m);
        if c.is_zero() {
            rem[k] = BigInt::zero();
            continue;
        }
        quo[k - db] = c.clone();
        for i in 0..=db {
            let t = (&rem[k - db + i] - &c * &b.coeff(i)).mod_floor(m);
            rem[k - db + i] = t;
        }
    }
    rem.truncate(db);
    (
        IntPoly::from_coeffs(quo),
        IntPoly::from_coeffs(rem.into_iter().map(|c| c.mod_floor(m)).collect()),
    )
}

/// Coefficients moved to the symmetric range (-m/2, m/2].
fn symmetric(f: &IntPoly, m: &BigInt) -> IntPoly {
    let half = m >> 1;
    IntPoly::from_coeffs(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Bezout pair s*a + t*b = 1 over F_p, with deg s < deg b, deg t < deg a.
fn bezout_mod_p(a: &IntPoly, b: &IntPoly, p: u64) -> (IntPoly, IntPoly) {
    let ctx = FpCtx::new(p);
    let fa = ctx.reduce_poly(a);
    let fb = ctx.reduce_poly(b);
    // Extended Euclid.
    let (mut r0, mut r1) = (fa.clone(), fb.clone());
    let mut s0 = crate::fp::FpPoly::one();
    let mut s1 = crate::fp::FpPoly::zero();
    let mut t0 = crate::fp::FpPoly::zero();
    let mut t1 = crate::fp::FpPoly::one();
    while !r1.is_zero() {
        let (q, r) = ctx.pdivrem(&r0, &r1);
        let ns = ctx.psub(&s0, &ctx.pmul(&q, &s1));
        let nt = ctx.psub(&t0, &ctx.pmul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    assert_eq!(r0.deg(), 0, "modular factors must be coprime");
    let inv = ctx.inv(r0.coeff(0));
    let s = ctx.pmul_scalar(&s0, inv);
    let t = ctx.pmul_scalar(&t0, inv);
    let lift = |f: &crate::fp::FpPoly| {
        IntPoly::from_coeffs(f.coeffs().iter().map(|&c| BigInt::from(c)).collect())
    };
    (lift(&s), lift(&t))
}

/// Quadratic lift of f = g*h from p to exactly `target` = p^(2^k).
fn lift_pair(f: &IntPoly, g0: &IntPoly, h0: &IntPoly, p: u64, target: &BigInt) -> (IntPoly, IntPoly) {
    let (mut s, mut t) = bezout_mod_p(g0, h0, p);
    let mut g = g0.clone();
    let mut h = h0.clone();
    let mut m = BigInt::from(p);
    while &m < target {
        let m2 = &m * &m;
        let e = zsub(f, &g.mul(&h), &m2);
        let (q, r) = zdivrem_monic(&zmul(&s, &e, &m2), &h, &m2);
        g = zred(&zadd(&g, &zmul(&t, &e, &m2), &m2).add(&zmul(&q, &g, &m2)), &m2);
        h = zadd(&h, &r, &m2);
        let b = zsub(&zadd(&zmul(&s, &g, &m2), &zmul(&t, &h, &m2), &m2), &IntPoly::one(), &m2);
        let (c, d) = zdivrem_monic(&zmul(&s, &b, &m2), &h, &m2);
        s = zsub(&s, &d, &m2);
        t = zsub(&zsub(&t, &zmul(&t, &b, &m2), &m2), &zmul(&c, &g, &m2), &m2);
        m = m2;
    }
    debug_assert_eq!(&m, target);
    (g, h)
}

/// Lifts the full list of pairwise-coprime monic factors of f from p to the
/// target modulus by recursive pair splitting.
fn hensel_tree(f: &IntPoly, factors: &[IntPoly], p: u64, target: &BigInt) -> Vec<IntPoly> {
    if factors.len() == 1 {
        return vec![zred(f, target)];
    }
    let mid = factors.len() / 2;
    let pm = BigInt::from(p);
    let mut a0 = IntPoly::one();
    for g in &factors[..mid] {
        a0 = zmul(&a0, g, &pm);
    }
    let mut b0 = IntPoly::one();
    for g in &factors[mid..] {
        b0 = zmul(&b0, g, &pm);
    }
    let (a, b) = lift_pair(f, &a0, &b0, p, target);
    let mut out = hensel_tree(&a, &factors[..mid], p, target);
    out.extend(hensel_tree(&b, &factors[mid..], p, target));
    out
}

/// Zassenhaus subset recombination over the lifted factors.
fn recombine(hh: &IntPoly, lifted: Vec<IntPoly>, modulus: &BigInt) -> Result<Vec<IntPoly>, FactorError> {
    let mut active = lifted;
    let mut cur = hh.clone();
    let mut out = Vec::new();
    let mut steps: u64 = 0;
    let mut card = 1usize;
    while 2 * card <= active.len() {
        let mut found: Option<Vec<usize>> = None;
        let mut combo: Vec<usize> = (0..card).collect();
        'search: loop {
            steps += 1;
            if steps > RECOMBINE_STEP_CAP {
                return Err(FactorError::Timeout { steps });
            }
            // Constant-term pretest before the full product.
            let mut c0 = BigInt::one();
            for &i in &combo {
                c0 = (c0 * active[i].coeff(0)).mod_floor(modulus);
            }
            let half = modulus >> 1;
            if &c0 > &half {
                c0 -= modulus;
            }
            let ok0 = !c0.is_zero() && cur.coeff(0).is_multiple_of(&c0);
            if ok0 {
                let mut prod = IntPoly::one();
                for &i in &combo {
                    prod = zmul(&prod, &active[i], modulus);
                }
                let cand = symmetric(&prod, modulus);
                if cur.div_exact(&cand).is_some() {
                    found = Some(combo.clone());
                    break 'search;
                }
            }
            // Next lexicographic combination.
            let k = active.len();
            let mut i = card;
            loop {
                if i == 0 {
                    break 'search;
                }
                i -= 1;
                if combo[i] != i + k - card {
                    combo[i] += 1;
                    for j in i + 1..card {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
        }
        match found {
            Some(combo) => {
                let mut prod = IntPoly::one();
                for &i in &combo {
                    prod = zmul(&prod, &active[i], modulus);
                }
                let cand = symmetric(&prod, modulus);
                cur = cur.div_exact(&cand).expect("rechecked division");
                out.push(cand);
                for &i in combo.iter().rev() {
                    active.remove(i);
                }
            }
            None => card += 1,
        }
    }
    if cur.deg() > 0 {
        out.push(cur);
    }
    Ok(out)
}
