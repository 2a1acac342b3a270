//! Finite sets of algebraic points of P^1(Qbar), stored as irreducible
//! minimal polynomials over Q with multiplicities, plus an optional point
//! at infinity.

use std::collections::BTreeMap;

use crate::exactcore::map::RationalMap;
use crate::exactcore::poly::{IntPoly, QPoly};
use crate::galois::overq::factor_over_q;

/// Roots of the listed irreducible polynomials (primitive, positive leading
/// coefficient, pairwise distinct), each with a multiplicity, plus infinity
/// with its own multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicPointSet {
    factors: Vec<(IntPoly, u32)>,
    infinity_mult: u32,
}

fn sort_factors(factors: &mut Vec<(IntPoly, u32)>) {
    factors.sort_by(|a, b| {
        (a.0.coeffs().len(), a.0.coeffs())
            .cmp(&(b.0.coeffs().len(), b.0.coeffs()))
    });
}

impl AlgebraicPointSet {
    pub fn empty() -> Self {
        AlgebraicPointSet {
            factors: vec![],
            infinity_mult: 0,
        }
    }

    /// Factors must be irreducible, primitive with positive leading
    /// coefficient, and pairwise distinct (as produced by factor_over_q).
    pub fn from_factorization(mut factors: Vec<(IntPoly, u32)>, infinity_mult: u32) -> Self {
        factors.retain(|(_, e)| *e > 0);
        sort_factors(&mut factors);
        debug_assert!(factors.windows(2).all(|w| w[0].0 != w[1].0));
        AlgebraicPointSet {
            factors,
            infinity_mult,
        }
    }

    pub fn factors(&self) -> &[(IntPoly, u32)] {
        &self.factors
    }

    /// The same factors as monic polynomials over Q, per the set's contract.
    pub fn monic_factors(&self) -> Vec<(QPoly, u32)> {
        self.factors
            .iter()
            .map(|(f, e)| (QPoly::from_int(f).monic(), *e))
            .collect()
    }

    pub fn includes_infinity(&self) -> bool {
        self.infinity_mult > 0
    }

    pub fn infinity_mult(&self) -> u32 {
        self.infinity_mult
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty() && self.infinity_mult == 0
    }

    /// Number of points counted with multiplicity and degree (conjugates
    /// counted separately), including infinity.
    pub fn total_multiplicity(&self) -> u64 {
        let finite: u64 = self
            .factors
            .iter()
            .map(|(f, e)| f.deg() as u64 * *e as u64)
            .sum();
        finite + self.infinity_mult as u64
    }

    pub fn total_degree(&self) -> usize {
        self.factors.iter().map(|(f, _)| f.deg()).sum()
    }

    pub fn contains_factor(&self, g: &IntPoly) -> bool {
        self.factors.iter().any(|(f, _)| f == g)
    }

    /// All multiplicities collapsed to 1 (set semantics).
    pub fn as_set(&self) -> Self {
        AlgebraicPointSet {
            factors: self.factors.iter().map(|(f, _)| (f.clone(), 1)).collect(),
            infinity_mult: self.infinity_mult.min(1),
        }
    }

    /// Set-semantics union: multiplicities combine by max.
    pub fn union_set(&self, other: &Self) -> Self {
        let mut merged: BTreeMap<IntPoly, u32> = BTreeMap::new();
        for (f, e) in self.factors.iter().chain(other.factors.iter()) {
            let slot = merged.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        let mut factors: Vec<(IntPoly, u32)> = merged.into_iter().collect();
        sort_factors(&mut factors);
        AlgebraicPointSet {
            factors,
            infinity_mult: self.infinity_mult.max(other.infinity_mult),
        }
    }

    /// Set-semantics containment (multiplicities ignored).
    pub fn is_subset_set(&self, other: &Self) -> bool {
        if self.infinity_mult > 0 && other.infinity_mult == 0 {
            return false;
        }
        self.factors
            .iter()
            .all(|(f, _)| other.contains_factor(f))
    }
}

/// Critical points of f with ramification multiplicities: the squarefree
/// factorization of the Wronskian p'q - pq', with infinity carrying the
/// degree drop 2d - 2 - deg W. Total multiplicity is always 2d - 2.
pub fn crit_poly(f: &RationalMap) -> AlgebraicPointSet {
    let w = f.wronskian();
    let inf = f.infinity_crit_multiplicity() as u32;
    let factors = if !w.is_zero() && w.deg() >= 1 {
        factor_over_q(&w)
            .expect("critical polynomial factors within resource limits")
            .factors
    } else {
        vec![]
    };
    AlgebraicPointSet::from_factorization(factors, inf)
}
