//! S-integrality of finite point sets in P^1(Q): the pairwise-reduction
//! predicate, exact minimal prime sets, and a bounded scan for the
//! four-point extension count.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactcore::point::ProjPointQ;
use crate::util::{is_prime, prime_divisors_big};

/// A finite set of places of Q: the listed primes together with the
/// Archimedean place, which is always included by convention.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PlaceSet {
    primes: BTreeSet<u64>,
}

impl PlaceSet {
    pub fn empty() -> Self {
        PlaceSet::default()
    }

    pub fn from_primes<I: IntoIterator<Item = u64>>(ps: I) -> Self {
        let primes: BTreeSet<u64> = ps.into_iter().collect();
        for &p in &primes {
            assert!(is_prime(p), "{} is not prime", p);
        }
        PlaceSet { primes }
    }

    /// The Archimedean place is always a member.
    pub fn includes_archimedean(&self) -> bool {
        true
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn insert(&mut self, p: u64) {
        assert!(is_prime(p), "{} is not prime", p);
        self.primes.insert(p);
    }

    pub fn union(&self, other: &PlaceSet) -> PlaceSet {
        PlaceSet {
            primes: self.primes.union(&other.primes).copied().collect(),
        }
    }

    /// The set with one prime removed (for minimality probes).
    pub fn without(&self, p: u64) -> PlaceSet {
        let mut primes = self.primes.clone();
        primes.remove(&p);
        PlaceSet { primes }
    }
}

impl std::fmt::Display for PlaceSet {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "{{arch")?;
        for p in &self.primes {
            write!(out, ", {}", p)?;
        }
        write!(out, "}}")
    }
}

/// A failed pair: the reductions of x and y collide at p (not in S).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonIntegralWitness {
    pub x: ProjPointQ,
    pub y: ProjPointQ,
    pub p: u64,
}

/// In coprime coordinates, the reductions of x and y agree mod p exactly
/// when p divides this determinant.
fn pair_det(x: &ProjPointQ, y: &ProjPointQ) -> BigInt {
    x.x1() * y.x2() - x.x2() * y.x1()
}

/// True iff every pair of distinct points in xs has distinct reductions at
/// every prime outside S; on failure returns the first offending pair with
/// its smallest offending prime. Points must be pairwise distinct.
pub fn is_s_integral_set(xs: &[ProjPointQ], s: &PlaceSet) -> Result<(), NonIntegralWitness> {
    for j in 0..xs.len() {
        for i in 0..j {
            let det = pair_det(&xs[i], &xs[j]);
            assert!(!det.is_zero(), "points must be pairwise distinct");
            if let Some(p) = smallest_prime_outside(&det, s) {
                return Err(NonIntegralWitness {
                    x: xs[i].clone(),
                    y: xs[j].clone(),
                    p,
                });
            }
        }
    }
    Ok(())
}

fn smallest_prime_outside(det: &BigInt, s: &PlaceSet) -> Option<u64> {
    if det.abs().is_one() {
        return None;
    }
    prime_divisors_big(det)
        .into_iter()
        .find(|&p| !s.contains(p))
}

/// The smallest S making xs S-integral: the primes dividing some pairwise
/// determinant. Points must be pairwise distinct.
pub fn minimal_s(xs: &[ProjPointQ]) -> PlaceSet {
    let mut primes = BTreeSet::new();
    for j in 0..xs.len() {
        for i in 0..j {
            let det = pair_det(&xs[i], &xs[j]);
            assert!(!det.is_zero(), "points must be pairwise distinct");
            if !det.abs().is_one() {
                primes.extend(prime_divisors_big(&det));
            }
        }
    }
    PlaceSet { primes }
}

/// All gamma in P^1(Q) with numerator and denominator bounded by n (infinity
/// included) such that xs + {gamma} stays S-integral. A bounded shadow of
/// the four-point finiteness statement: callers report counts over growing
/// n as a table rather than asserting a bound.
pub fn s_integral_extensions(xs: &[ProjPointQ], s: &PlaceSet, n: i64) -> Vec<ProjPointQ> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut consider = |gamma: ProjPointQ| {
        if xs.contains(&gamma) {
            return;
        }
        let ok = xs.iter().all(|x| {
            let det = pair_det(x, &gamma);
            smallest_prime_outside(&det, s).is_none()
        });
        if ok {
            out.push(gamma);
        }
    };
    consider(ProjPointQ::infinity());
    for b in 1..=n {
        for a in -n..=n {
            let gamma = ProjPointQ::new(BigInt::from(a), BigInt::from(b));
            // Skip non-reduced coordinate pairs to visit each point once.
            if gamma.x2() != &BigInt::from(b) {
                continue;
            }
            consider(gamma);
        }
    }
    out.sort();
    out
}
