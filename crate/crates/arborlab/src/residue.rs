//! Reduction of maps and points modulo primes, good-reduction certification,
//! functional-graph dynamics over P^1(F_p), the periodic-place search, and
//! the local condition checker feeding the witness pipeline.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactcore::map::RationalMap;
use crate::exactcore::point::ProjPointQ;
use crate::exactcore::rat::Rat;
use crate::fp::{FpCtx, FpPoly};
use crate::galois::modp::roots_mod_p;
use crate::orbits::PcfCertificate;
use crate::util::{is_prime, primes_up_to, valuation_big};

/// Dense successor graphs are precomputed up to this prime size; larger
/// primes fall back to Brent cycle detection per query.
pub const DENSE_GRAPH_MAX: u64 = 1 << 20;

/// A non-Archimedean place of Q: the prime p, with |p|_p = eps = 1/p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Place {
    pub p: u64,
}

impl Place {
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p), "place requires a prime");
        Place { p }
    }

    /// |p|_p as an exact rational.
    pub fn eps(&self) -> Rat {
        Rat::new(1.into(), self.p.into())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("bad reduction at p = {p}: v_p(resultant) = {valuation}")]
    BadReduction { p: u64, valuation: u32 },
}

/// f mod p with its functional graph on P^1(F_p). Point indices are
/// 0..p for finite residues and p for infinity.
#[derive(Clone, Debug)]
pub struct ReducedMap {
    ctx: FpCtx,
    pbar: FpPoly,
    qbar: FpPoly,
    /// Degree-d homogeneous coefficient vectors (length d + 1).
    hp: Vec<u64>,
    hq: Vec<u64>,
    /// Reduced Wronskian p'q - pq' mod p (zero only in wild characteristic).
    wbar: FpPoly,
    /// Reversed-chart numerator/denominator x^d p(1/x), x^d q(1/x) and
    /// their Wronskian, for dynamics at infinity.
    prev: FpPoly,
    qrev: FpPoly,
    wrev: FpPoly,
    d: usize,
    graph: Option<Vec<u32>>,
}

/// Good reduction iff the degree-d homogeneous resultant of (p, q) is a
/// p-adic unit; the returned map carries its successor graph for p within
/// the dense bound.
pub fn reduce_map(f: &RationalMap, v: Place) -> Result<ReducedMap, ReduceError> {
    let res = f.homogeneous_resultant();
    let val = valuation_big(&res, v.p);
    if val > 0 {
        return Err(ReduceError::BadReduction {
            p: v.p,
            valuation: val,
        });
    }
    let ctx = FpCtx::new(v.p);
    let d = f.degree();
    let pbar = ctx.reduce_poly(f.p());
    let qbar = ctx.reduce_poly(f.q());
    debug_assert!(pbar.deg().max(qbar.deg()) == d);
    let hp: Vec<u64> = f.homog_p().iter().map(|c| ctx.reduce_bigint(c)).collect();
    let hq: Vec<u64> = f.homog_q().iter().map(|c| ctx.reduce_bigint(c)).collect();
    let wbar = ctx.psub(
        &ctx.pmul(&ctx.pderivative(&pbar), &qbar),
        &ctx.pmul(&pbar, &ctx.pderivative(&qbar)),
    );
    let mut hpr = hp.clone();
    let mut hqr = hq.clone();
    hpr.reverse();
    hqr.reverse();
    let prev = FpPoly::from_vec(hpr);
    let qrev = FpPoly::from_vec(hqr);
    let wrev = ctx.psub(
        &ctx.pmul(&ctx.pderivative(&prev), &qrev),
        &ctx.pmul(&prev, &ctx.pderivative(&qrev)),
    );
    let mut out = ReducedMap {
        ctx,
        pbar,
        qbar,
        hp,
        hq,
        wbar,
        prev,
        qrev,
        wrev,
        d,
        graph: None,
    };
    if v.p <= DENSE_GRAPH_MAX {
        let n = v.p as usize + 1;
        let mut g = Vec::with_capacity(n);
        for i in 0..n as u64 {
            g.push(out.step_direct(i) as u32);
        }
        out.graph = Some(g);
    }
    Ok(out)
}

impl ReducedMap {
    pub fn p(&self) -> u64 {
        self.ctx.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn pbar(&self) -> &FpPoly {
        &self.pbar
    }

    pub fn qbar(&self) -> &FpPoly {
        &self.qbar
    }

    pub fn wronskian_bar(&self) -> &FpPoly {
        &self.wbar
    }

    /// Index of the point at infinity.
    pub fn infinity_index(&self) -> u64 {
        self.ctx.p
    }

    pub fn graph(&self) -> Option<&[u32]> {
        self.graph.as_deref()
    }

    /// One application of the reduced map to a point index.
    pub fn step(&self, i: u64) -> u64 {
        match &self.graph {
            Some(g) => g[i as usize] as u64,
            None => self.step_direct(i),
        }
    }

    fn step_direct(&self, i: u64) -> u64 {
        let ctx = &self.ctx;
        if i < ctx.p {
            let u = ctx.peval(&self.pbar, i);
            let v = ctx.peval(&self.qbar, i);
            if v != 0 {
                ctx.mul(u, ctx.inv(v))
            } else {
                debug_assert!(u != 0);
                ctx.p
            }
        } else {
            let a = self.hp[self.d];
            let b = self.hq[self.d];
            if b != 0 {
                ctx.mul(a, ctx.inv(b))
            } else {
                debug_assert!(a != 0);
                ctx.p
            }
        }
    }

    /// Derivative of the step i -> f(i) in the charts that keep both ends
    /// affine (1/x around infinity).
    pub fn step_derivative(&self, i: u64) -> u64 {
        let ctx = &self.ctx;
        if i < ctx.p {
            let v = ctx.peval(&self.qbar, i);
            let w = ctx.peval(&self.wbar, i);
            if v != 0 {
                ctx.mul(w, ctx.pow(ctx.inv(v), 2))
            } else {
                let u = ctx.peval(&self.pbar, i);
                ctx.neg(ctx.mul(w, ctx.pow(ctx.inv(u), 2)))
            }
        } else {
            // Source chart z = 1/x at z = 0: f(1/z) = prev(z)/qrev(z).
            let v = self.qrev.coeff(0);
            let w = self.wrev.coeff(0);
            if v != 0 {
                ctx.mul(w, ctx.pow(ctx.inv(v), 2))
            } else {
                let u = self.prev.coeff(0);
                ctx.neg(ctx.mul(w, ctx.pow(ctx.inv(u), 2)))
            }
        }
    }
}

/// Exact tail, period, cycle, and cycle multiplier of a point's orbit
/// under the reduced map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleData {
    pub tail: u32,
    pub period: u32,
    pub cycle_points: Vec<u64>,
    /// Product of chart-correct derivatives along the cycle, in F_p.
    pub multiplier: u64,
}

pub fn orbit_mod_p(fbar: &ReducedMap, pt: u64) -> CycleData {
    assert!(pt <= fbar.p());
    let (tail, period) = match fbar.graph() {
        Some(g) => {
            let mut pos = vec![u32::MAX; g.len()];
            let mut cur = pt;
            let mut n = 0u32;
            loop {
                if pos[cur as usize] != u32::MAX {
                    let j = pos[cur as usize];
                    break (j, n - j);
                }
                pos[cur as usize] = n;
                cur = g[cur as usize] as u64;
                n += 1;
            }
        }
        None => brent(fbar, pt),
    };
    let mut start = pt;
    for _ in 0..tail {
        start = fbar.step(start);
    }
    let ctx = FpCtx::new(fbar.p());
    let mut cycle_points = Vec::with_capacity(period as usize);
    let mut cur = start;
    let mut multiplier = 1u64;
    for _ in 0..period {
        cycle_points.push(cur);
        multiplier = ctx.mul(multiplier, fbar.step_derivative(cur));
        cur = fbar.step(cur);
    }
    debug_assert_eq!(cur, start);
    CycleData {
        tail,
        period,
        cycle_points,
        multiplier,
    }
}

/// Brent cycle detection: O(tail + period) steps, O(1) memory.
fn brent(fbar: &ReducedMap, x0: u64) -> (u32, u32) {
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = x0;
    let mut hare = fbar.step(x0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = fbar.step(hare);
        lam += 1;
    }
    let mut hare = x0;
    for _ in 0..lam {
        hare = fbar.step(hare);
    }
    let mut tortoise = x0;
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = fbar.step(tortoise);
        hare = fbar.step(hare);
        mu += 1;
    }
    (mu as u32, lam as u32)
}

/// All primes p <= pmax with good reduction, |alpha|_p <= 1, and the reduced
/// point lying on a cycle. The scan over primes runs in parallel; results
/// are sorted by p. (The underlying theorem needs alpha not strictly
/// preperiodic; callers should warn when that hypothesis fails.)
pub fn find_periodic_places(
    f: &RationalMap,
    alpha: &ProjPointQ,
    pmax: u64,
) -> Vec<(Place, CycleData)> {
    let mut out: Vec<(Place, CycleData)> = primes_up_to(pmax)
        .into_par_iter()
        .filter_map(|p| {
            let v = Place::new(p);
            let fbar = reduce_map(f, v).ok()?;
            if !alpha.is_infinity() && (alpha.x2() % &BigInt::from(p)).is_zero() {
                return None;
            }
            let abar = alpha.reduce_mod(p);
            let cy = orbit_mod_p(&fbar, abar);
            (cy.tail == 0).then_some((v, cy))
        })
        .collect();
    out.sort_by_key(|(v, _)| v.p);
    out
}

/// Flags and evidence for the local witness conditions at one place:
/// (A) char > deg, (B) good reduction, (C) |alpha|_p <= 1, (D) reduced point
/// periodic, (E) the first M orbit residues avoid every critical residue,
/// plus the unit-multiplier requirement on the cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub p: u64,
    pub a_char: bool,
    pub b_good_reduction: bool,
    /// v_p of the homogeneous resultant; 0 under good reduction.
    pub resultant_valuation: u32,
    pub c_integral: bool,
    pub d_periodic: bool,
    pub e_avoids_critical: bool,
    pub unit_multiplier: bool,
    /// Cycle evidence for (D) and the multiplier (present under (B)).
    pub cycle: Option<CycleData>,
    /// First M orbit residues of the reduced point (evidence for (E)).
    pub orbit_residues: Vec<u64>,
    /// Residues of critical points mod p, infinity encoded as p.
    pub critical_residues: Vec<u64>,
    /// True when alpha = infinity forced the 1/x chart swap.
    pub conjugated_at_infinity: bool,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.a_char
            && self.b_good_reduction
            && self.c_integral
            && self.d_periodic
            && self.e_avoids_critical
            && self.unit_multiplier
    }

    pub fn failed(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.a_char {
            out.push("A:char");
        }
        if !self.b_good_reduction {
            out.push("B:reduction");
        }
        if !self.c_integral {
            out.push("C:integral");
        }
        if !self.d_periodic {
            out.push("D:periodic");
        }
        if !self.e_avoids_critical {
            out.push("E:critical-avoidance");
        }
        if !self.unit_multiplier {
            out.push("unit-multiplier");
        }
        out
    }
}

/// Evaluates conditions (A)-(E) and the unit-multiplier flag at one place.
/// When alpha = infinity the map is conjugated by 1/x first, sending alpha
/// to 0; M comes from the PCF certificate.
pub fn check_conditions(
    f: &RationalMap,
    alpha: &ProjPointQ,
    v: Place,
    cert: &PcfCertificate,
) -> ConditionReport {
    let conjugated = alpha.is_infinity();
    let (f, alpha) = if conjugated {
        (f.conj_by_inversion(), ProjPointQ::from_int(0))
    } else {
        (f.clone(), alpha.clone())
    };
    let p = v.p;
    let d = f.degree();
    let a_char = p > d as u64;
    let c_integral = !(alpha.x2() % &BigInt::from(p)).is_zero();

    let (fbar, resultant_valuation) = match reduce_map(&f, v) {
        Ok(r) => (Some(r), 0),
        Err(ReduceError::BadReduction { valuation, .. }) => (None, valuation),
    };
    let b_good_reduction = fbar.is_some();

    let mut d_periodic = false;
    let mut unit_multiplier = false;
    let mut e_avoids_critical = false;
    let mut cycle = None;
    let mut orbit_residues = Vec::new();
    let mut critical_residues = Vec::new();

    if let Some(fbar) = &fbar {
        let abar = alpha.reduce_mod(p);
        let cy = orbit_mod_p(fbar, abar);
        d_periodic = cy.tail == 0;
        unit_multiplier = d_periodic && cy.multiplier != 0;
        cycle = Some(cy);

        let ctx = FpCtx::new(p);
        let wbar = fbar.wronskian_bar();
        if !wbar.is_zero() {
            critical_residues = roots_mod_p(&ctx, wbar);
            if wbar.deg() < 2 * d - 2 {
                critical_residues.push(fbar.infinity_index());
            }
            let mut cur = abar;
            for _ in 0..cert.m {
                orbit_residues.push(cur);
                cur = fbar.step(cur);
            }
            e_avoids_critical = orbit_residues
                .iter()
                .all(|r| !critical_residues.contains(r));
        }
        // wbar = 0 only in wild characteristic: (E) stays conservatively false.
    }

    ConditionReport {
        p,
        a_char,
        b_good_reduction,
        resultant_valuation,
        c_integral,
        d_periodic,
        e_avoids_critical,
        unit_multiplier,
        cycle,
        orbit_residues,
        critical_residues,
        conjugated_at_infinity: conjugated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::parse::parse_map;
    use crate::orbits::pcf_certify;

    fn m(s: &str) -> RationalMap {
        parse_map(s).unwrap()
    }

    fn pt(s: &str) -> ProjPointQ {
        ProjPointQ::parse(s).unwrap()
    }

    #[test]
    fn reduction_good_and_bad() {
        let fbar = reduce_map(&m("x^2-2"), Place::new(5)).unwrap();
        assert_eq!(fbar.pbar().coeffs(), &[3, 0, 1]);
        assert!(fbar.qbar().is_one());

        let err = reduce_map(&m("(x^2+1)/(5x)"), Place::new(5)).unwrap_err();
        assert_eq!(
            err,
            ReduceError::BadReduction {
                p: 5,
                valuation: 2
            }
        );
        let err = reduce_map(&m("(x^2-1)/(2x)"), Place::new(2)).unwrap_err();
        assert_eq!(
            err,
            ReduceError::BadReduction {
                p: 2,
                valuation: 2
            }
        );
        assert!(reduce_map(&m("(x^2-1)/(2x)"), Place::new(3)).is_ok());
    }

    #[test]
    fn reduction_commutes_with_eval() {
        let f = m("(3x^2-1)/(x+2)");
        for p in [3u64, 7, 11, 101] {
            let v = Place::new(p);
            let Ok(fbar) = reduce_map(&f, v) else { continue };
            for a in -6i64..=6 {
                let pt = ProjPointQ::from_int(a);
                let lhs = f.eval(&pt).reduce_mod(p);
                let rhs = fbar.step(pt.reduce_mod(p));
                assert_eq!(lhs, rhs, "p={} a={}", p, a);
            }
            assert_eq!(
                f.eval(&ProjPointQ::infinity()).reduce_mod(p),
                fbar.step(fbar.infinity_index())
            );
        }
    }

    #[test]
    fn orbit_examples() {
        let fbar = reduce_map(&m("x^2+1"), Place::new(5)).unwrap();
        let cy = orbit_mod_p(&fbar, 0);
        assert_eq!((cy.tail, cy.period), (0, 3));
        assert_eq!(cy.cycle_points, vec![0, 1, 2]);

        let fbar = reduce_map(&m("x^2+1"), Place::new(3)).unwrap();
        let cy = orbit_mod_p(&fbar, 0);
        assert_eq!((cy.tail, cy.period), (2, 1));

        let fbar = reduce_map(&m("x^2"), Place::new(7)).unwrap();
        let cy = orbit_mod_p(&fbar, 2);
        assert_eq!((cy.tail, cy.period), (0, 2));
        assert_eq!(cy.cycle_points, vec![2, 4]);
        assert_eq!(cy.multiplier, 4);
    }

    #[test]
    fn brent_matches_graph_walk() {
        // Force the sparse path by querying through brent directly.
        let fbar = reduce_map(&m("x^2+1"), Place::new(101)).unwrap();
        for pt in [0u64, 1, 5, 42, 100, 101] {
            let dense = orbit_mod_p(&fbar, pt);
            let (tail, period) = brent(&fbar, pt);
            assert_eq!((tail, period), (dense.tail, dense.period));
        }
    }

    #[test]
    fn multiplier_at_infinity_cycle() {
        // 1/x^2 swaps 0 and infinity; the 2-cycle is superattracting.
        let fbar = reduce_map(&m("1/x^2"), Place::new(5)).unwrap();
        let cy = orbit_mod_p(&fbar, 0);
        assert_eq!((cy.tail, cy.period), (0, 2));
        assert_eq!(cy.cycle_points, vec![0, 5]);
        assert_eq!(cy.multiplier, 0);
        // (x^2+1)/x fixes infinity with derivative 1 in the 1/x chart:
        // 1/f(1/x) = x/(x^2+1) has derivative 1 at 0.
        let fbar = reduce_map(&m("(x^2+1)/x"), Place::new(7)).unwrap();
        assert_eq!(fbar.step(7), 7);
        assert_eq!(fbar.step_derivative(7), 1);
    }

    #[test]
    fn periodic_places_quadratic() {
        let got = find_periodic_places(&m("x^2+1"), &pt("0"), 30);
        let summary: Vec<(u64, u32)> = got.iter().map(|(v, c)| (v.p, c.period)).collect();
        assert_eq!(summary, vec![(2, 2), (5, 3), (13, 4)]);

        let got = find_periodic_places(&m("x^2-2"), &pt("-1"), 10);
        let summary: Vec<(u64, u32)> = got.iter().map(|(v, c)| (v.p, c.period)).collect();
        assert_eq!(summary, vec![(2, 1), (3, 1), (5, 1), (7, 1)]);

        let got = find_periodic_places(&m("x^2"), &pt("2"), 10);
        assert!(got.iter().any(|(v, c)| v.p == 7 && c.period == 2));
    }

    #[test]
    fn periodic_places_skip_denominator_primes() {
        // alpha = 1/2 is not 2-integral: p = 2 must be excluded.
        let got = find_periodic_places(&m("x^2-1"), &pt("1/2"), 20);
        assert!(got.iter().all(|(v, _)| v.p != 2));
    }

    #[test]
    fn conditions_for_squaring_at_two() {
        let f = m("x^2");
        let cert = pcf_certify(&f).unwrap();
        let a = pt("2");

        let rep = check_conditions(&f, &a, Place::new(7), &cert);
        assert!(rep.all_pass(), "failed: {:?}", rep.failed());
        assert_eq!(rep.cycle.as_ref().unwrap().multiplier, 4);
        assert_eq!(rep.orbit_residues, vec![2]);
        assert_eq!(rep.critical_residues, vec![0, 7]);

        let rep = check_conditions(&f, &a, Place::new(3), &cert);
        assert!(!rep.d_periodic);
        assert!(rep.a_char && rep.b_good_reduction && rep.c_integral);
        assert!(rep.failed().contains(&"D:periodic"));

        let rep = check_conditions(&f, &a, Place::new(2), &cert);
        assert!(!rep.a_char);
        assert!(!rep.e_avoids_critical);
    }

    #[test]
    fn conditions_chart_swap_at_infinity() {
        let f = m("x^2");
        let cert = pcf_certify(&f).unwrap();
        let rep = check_conditions(&f, &pt("inf"), Place::new(5), &cert);
        assert!(rep.conjugated_at_infinity);
        // 1/x^2 at 0: periodic but critical (0 is a critical residue).
        assert!(rep.d_periodic);
        assert!(!rep.e_avoids_critical);
        assert!(!rep.all_pass());
    }

    #[test]
    fn good_reduction_composes() {
        let f = m("(x^2+3)/(2x+1)");
        for p in [5u64, 7, 11] {
            let v = Place::new(p);
            if reduce_map(&f, v).is_ok() {
                for n in 2..=3 {
                    assert!(reduce_map(&f.iterate(n), v).is_ok(), "f^{} at {}", n, p);
                }
            }
        }
    }
}
