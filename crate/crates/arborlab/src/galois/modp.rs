//! Complete factorization over F_p: squarefree split, distinct-degree split,
//! then equal-degree split with deterministically enumerated test polynomials
//! so repeated runs produce identical output.

use num_bigint::BigUint;
use num_traits::One;

use crate::fp::{FpCtx, FpPoly};

/// Monic irreducible factors with multiplicity, sorted by (degree,
/// coefficients ascending-lex). Input must be nonzero.
pub fn factor_mod_p(ctx: &FpCtx, f: &FpPoly) -> Vec<(FpPoly, u32)> {
    assert!(!f.is_zero());
    let mut out: Vec<(FpPoly, u32)> = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    for (g, e) in squarefree_decomp(ctx, &ctx.pmonic(f)) {
        for (h, d) in distinct_degree(ctx, &g) {
            for irr in equal_degree(ctx, &h, d) {
                out.push((irr, e));
            }
        }
    }
    out.sort_by(|a, b| {
        (a.0.deg(), a.0.coeffs()).cmp(&(b.0.deg(), b.0.coeffs()))
    });
    out
}

/// Roots in F_p of a nonzero polynomial, sorted ascending.
pub fn roots_mod_p(ctx: &FpCtx, f: &FpPoly) -> Vec<u64> {
    assert!(!f.is_zero());
    if f.deg() == 0 {
        return vec![];
    }
    // gcd with x^p - x isolates the split part.
    let xp = ctx.ppowmod(&FpPoly::x(), &BigUint::from(ctx.p), f);
    let lin = ctx.pgcd(&ctx.psub(&xp, &FpPoly::x()), f);
    if lin.deg() == 0 {
        return vec![];
    }
    let mut roots: Vec<u64> = equal_degree(ctx, &lin, 1)
        .into_iter()
        .map(|g| ctx.neg(g.coeff(0)))
        .collect();
    roots.sort_unstable();
    roots
}

/// Irreducible-factor degrees (sorted, with repeats) of a squarefree f,
/// from the distinct-degree split alone.
pub fn degree_multiset(ctx: &FpCtx, f: &FpPoly) -> Vec<usize> {
    assert!(!f.is_zero() && f.deg() >= 1);
    debug_assert!(is_squarefree_mod_p(ctx, f));
    let mut out = Vec::new();
    for (piece, d) in distinct_degree(ctx, &ctx.pmonic(f)) {
        for _ in 0..piece.deg() / d {
            out.push(d);
        }
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree_mod_p(ctx: &FpCtx, f: &FpPoly) -> bool {
    assert!(!f.is_zero() && f.deg() >= 1);
    let d = ctx.pderivative(f);
    if d.is_zero() {
        return false;
    }
    ctx.pgcd(f, &d).deg() == 0
}

/// f must be monic nonconstant. Yields (monic squarefree, multiplicity).
fn squarefree_decomp(ctx: &FpCtx, f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    sfd_inner(ctx, f, 1, &mut out);
    out
}

fn sfd_inner(ctx: &FpCtx, f: &FpPoly, scale: u32, out: &mut Vec<(FpPoly, u32)>) {
    if f.deg() == 0 {
        return;
    }
    let df = ctx.pderivative(f);
    if df.is_zero() {
        // f = g(x^p) = g(x)^p over F_p: reindex coefficients.
        sfd_inner(ctx, &pth_root(ctx, f), scale * ctx.p as u32, out);
        return;
    }
    let mut c = ctx.pgcd(f, &df);
    let mut w = ctx.pdivrem(f, &c).0;
    let mut i = 1u32;
    while w.deg() > 0 {
        let y = ctx.pgcd(&w, &c);
        let z = ctx.pdivrem(&w, &y).0;
        if z.deg() > 0 {
            out.push((z, i * scale));
        }
        i += 1;
        w = y;
        c = ctx.pdivrem(&c, &w).0;
    }
    if c.deg() > 0 {
        sfd_inner(ctx, &pth_root(ctx, &c), scale * ctx.p as u32, out);
    }
}

/// p-th root of g(x^p); identity on coefficients since a^p = a in F_p.
fn pth_root(ctx: &FpCtx, f: &FpPoly) -> FpPoly {
    let p = ctx.p as usize;
    debug_assert!(f.coeffs().iter().enumerate().all(|(i, &c)| c == 0 || i % p == 0));
    FpPoly::from_vec(f.coeffs().iter().step_by(p).copied().collect())
}

/// f monic squarefree. Yields (product of the irreducibles of degree d, d).
fn distinct_degree(ctx: &FpCtx, f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = ctx.prem(&FpPoly::x(), f);
    let mut d = 0usize;
    while rest.deg() >= 1 {
        d += 1;
        if 2 * d > rest.deg() {
            out.push((rest.clone(), rest.deg()));
            break;
        }
        h = ctx.ppowmod(&h, &BigUint::from(ctx.p), &rest);
        let g = ctx.pgcd(&ctx.psub(&h, &FpPoly::x()), &rest);
        if g.deg() > 0 {
            out.push((g.clone(), d));
            rest = ctx.pdivrem(&rest, &g).0;
            h = ctx.prem(&h, &rest);
        }
    }
    out
}

/// Deterministic equal-degree split: f monic squarefree, all of whose
/// irreducible factors have degree d.
fn equal_degree(ctx: &FpCtx, f: &FpPoly, d: usize) -> Vec<FpPoly> {
    let mut out = Vec::new();
    edf_inner(ctx, f, d, &mut out);
    out.sort_by(|a, b| (a.deg(), a.coeffs()).cmp(&(b.deg(), b.coeffs())));
    out
}

fn edf_inner(ctx: &FpCtx, f: &FpPoly, d: usize, out: &mut Vec<FpPoly>) {
    if f.deg() == d {
        out.push(ctx.pmonic(f));
        return;
    }
    let split = if ctx.p == 2 {
        edf_split_char2(ctx, f, d)
    } else {
        edf_split_odd(ctx, f, d)
    };
    edf_inner(ctx, &split, d, out);
    let co = ctx.pdivrem(f, &split).0;
    edf_inner(ctx, &co, d, out);
}

/// Test polynomials in a fixed enumeration: the base-p digits of 1, 2, 3, ...
fn nth_test_poly(p: u64, n: u64) -> FpPoly {
    let mut digits = Vec::new();
    let mut m = n;
    while m > 0 {
        digits.push(m % p);
        m /= p;
    }
    FpPoly::from_vec(digits)
}

fn edf_split_odd(ctx: &FpCtx, f: &FpPoly, d: usize) -> FpPoly {
    // e = (p^d - 1)/2; t^e is +-1 on each factor's residue field, and the
    // signs disagree somewhere for enough t.
    let pd = BigUint::from(ctx.p).pow(d as u32);
    let e = (&pd - BigUint::one()) >> 1;
    let mut n = 1u64;
    loop {
        let t = nth_test_poly(ctx.p, n);
        n += 1;
        // Constants never separate the factors.
        if t.is_zero() || t.deg() == 0 {
            continue;
        }
        let te = ctx.ppowmod(&t, &e, f);
        let g1 = ctx.pgcd(&ctx.psub(&te, &FpPoly::one()), f);
        if g1.deg() > 0 && g1.deg() < f.deg() {
            return g1;
        }
        // t^e = 0 happens when gcd(t, f) is proper.
        let g0 = ctx.pgcd(&t, f);
        if g0.deg() > 0 && g0.deg() < f.deg() {
            return g0;
        }
    }
}

fn edf_split_char2(ctx: &FpCtx, f: &FpPoly, d: usize) -> FpPoly {
    // Trace map T(t) = t + t^2 + ... + t^(2^(d-1)) takes values 0/1 on each
    // factor; gcd(T(t), f) separates for enough t.
    let mut n = 1u64;
    loop {
        let t = nth_test_poly(2, n);
        n += 1;
        let mut tr = ctx.prem(&t, f);
        let mut sq = tr.clone();
        for _ in 1..d {
            sq = ctx.prem(&ctx.pmul(&sq, &sq), f);
            tr = ctx.padd(&tr, &sq);
        }
        let g = ctx.pgcd(&tr, f);
        if g.deg() > 0 && g.deg() < f.deg() {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(p: u64, coeffs: &[i64]) -> Vec<(FpPoly, u32)> {
        let ctx = FpCtx::new(p);
        let f = FpPoly::from_vec(
            coeffs
                .iter()
                .map(|&c| c.rem_euclid(p as i64) as u64)
                .collect(),
        );
        factor_mod_p(&ctx, &f)
    }

    #[test]
    fn splits_completely() {
        // x^2 - 1 = (x+1)(x-1) mod 7
        let fs = fac(7, &[-1, 0, 1]);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].0.coeffs(), &[1, 1]);
        assert_eq!(fs[1].0.coeffs(), &[6, 1]);
    }

    #[test]
    fn keeps_irreducible_quadratic() {
        // x^2 + 1 irreducible mod 3
        let fs = fac(3, &[1, 0, 1]);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.deg(), 2);
        assert_eq!(fs[0].1, 1);
    }

    #[test]
    fn multiplicities_and_pth_powers() {
        // (x+1)^2 (x^2+x+1) mod 2: x^2+x+1 irreducible.
        let ctx = FpCtx::new(2);
        let a = FpPoly::from_vec(vec![1, 1]);
        let b = FpPoly::from_vec(vec![1, 1, 1]);
        let f = ctx.pmul(&ctx.pmul(&a, &a), &b);
        let fs = factor_mod_p(&ctx, &f);
        assert_eq!(fs, vec![(a, 2), (b, 1)]);
        // x^9 - x^3 = x^3 (x-1)^3 (x+1)^3 mod 3.
        let fs = fac(3, &[0, 0, 0, -1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(
            fs,
            vec![
                (FpPoly::from_vec(vec![0, 1]), 3),
                (FpPoly::from_vec(vec![1, 1]), 3),
                (FpPoly::from_vec(vec![2, 1]), 3),
            ]
        );
    }

    #[test]
    fn quartic_frobenius_degrees() {
        // x^4 - 2 mod 7: degrees 1, 1, 2.
        let fs = fac(7, &[-2, 0, 0, 0, 1]);
        let mut degs: Vec<usize> = fs.iter().map(|(g, _)| g.deg()).collect();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 2]);
        // x^4 - 2 mod 3: degrees 2, 2.
        let fs = fac(3, &[-2, 0, 0, 0, 1]);
        let degs: Vec<usize> = fs.iter().map(|(g, _)| g.deg()).collect();
        assert_eq!(degs, vec![2, 2]);
    }

    #[test]
    fn roots_listing() {
        let ctx = FpCtx::new(13);
        // x^3 - x has roots 0, 1, 12.
        let f = FpPoly::from_vec(vec![0, 12, 0, 1]);
        assert_eq!(roots_mod_p(&ctx, &f), vec![0, 1, 12]);
        // x^2 + 1 mod 13: roots 5, 8.
        let g = FpPoly::from_vec(vec![1, 0, 1]);
        assert_eq!(roots_mod_p(&ctx, &g), vec![5, 8]);
    }
}
