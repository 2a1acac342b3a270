//! Preimage towers over Q: level polynomials F_n, per-level Galois verdicts,
//! Chebyshev and powering normal forms, affine conjugacy over number fields,
//! and the witness pipeline that assembles a certificate from local data.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::exactcore::algset::AlgebraicPointSet;
use crate::exactcore::map::RationalMap;
use crate::exactcore::parse::parse_map;
use crate::exactcore::point::ProjPointQ;
use crate::exactcore::poly::{IntPoly, QPoly};
use crate::exactcore::rat::{rat_int, Rat};
use crate::galois::numfield::{
    factor_over_nf, is_abelian_galois, unequal_degree_witness, GaloisVerdict, NfPoly,
    NonAbelianWitness, NumberField,
};
use crate::galois::overq::{factor_over_q, FactorError, FactorizationQ};
use crate::orbits::{classify_orbit, is_exceptional, pcf_certify, OrbitError};
use crate::padic::{backward_orbit_local, PadicError, PadicInt};
use crate::residue::{check_conditions, ConditionReport, Place};
use crate::util::primes_up_to;

/// Largest level-polynomial degree the exact Galois machinery will accept.
pub const TOWER_DEGREE_CAP: usize = 64;

/// Prime bound for the unequal-degrees fast path before exact group work.
const FAST_PATH_PMAX: u64 = 200;

/// Backward-orbit depth recorded in a witness certificate.
pub const WITNESS_BACKWARD_LEVELS: u32 = 2;

/// Requested p-adic precision for certificate lifts.
pub const WITNESS_PRECISION: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("base point is exceptional; its preimages generate no tower")]
    ExceptionalBase,
    #[error("level {level} polynomial has degree {degree}, above the cap {cap}")]
    DegreeCap { level: u32, degree: usize, cap: usize },
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// F_n = x2 * P_n - x1 * Q_n, primitive with positive leading coefficient,
/// where f^n = P_n / Q_n in lowest terms. Roots are the affine n-th
/// preimages of alpha; deg F_n < d^n records preimages at infinity.
pub fn level_polynomial(f: &RationalMap, alpha: &ProjPointQ, n: u32) -> IntPoly {
    assert!(n >= 1, "levels start at 1");
    let fn_ = f.iterate(n);
    let num = fn_
        .p()
        .mul_scalar(alpha.x2())
        .sub(&fn_.q().mul_scalar(alpha.x1()));
    assert!(!num.is_zero(), "alpha must not be totally invariant");
    num.primitive_normalized()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLevel {
    pub n: u32,
    pub poly: IntPoly,
    /// d^n - deg F_n: multiplicity of infinity among the n-th preimages.
    pub infinity_multiplicity: usize,
    pub factorization: FactorizationQ,
    /// One verdict per irreducible factor, in factorization order.
    pub verdicts: Vec<GaloisVerdict>,
    pub level_abelian: bool,
}

impl TowerLevel {
    /// Roots of F_n together with infinity when it occurs as a preimage.
    pub fn preimage_set(&self) -> AlgebraicPointSet {
        AlgebraicPointSet::from_factorization(
            self.factorization.factors.clone(),
            self.infinity_multiplicity as u32,
        )
    }
}

/// Levels 1..=n_max of the preimage tower of alpha under f, each with its
/// factorization over Q and a Galois verdict per factor. Stops after the
/// first level containing a nonabelian factor (that level is included):
/// higher levels contain it as a subfield, so the verdict is settled.
pub fn analyze_tower(
    f: &RationalMap,
    alpha: &ProjPointQ,
    n_max: u32,
) -> Result<Vec<TowerLevel>, TowerError> {
    if is_exceptional(f, alpha) {
        return Err(TowerError::ExceptionalBase);
    }
    let d = f.degree();
    let mut levels = Vec::new();
    for n in 1..=n_max {
        let full = d
            .checked_pow(n)
            .filter(|&dn| dn <= TOWER_DEGREE_CAP)
            .ok_or_else(|| TowerError::DegreeCap {
                level: n,
                degree: d.checked_pow(n).unwrap_or(usize::MAX),
                cap: TOWER_DEGREE_CAP,
            })?;
        let poly = level_polynomial(f, alpha, n);
        let infinity_multiplicity = full - poly.deg();
        let factorization = if poly.deg() == 0 {
            FactorizationQ {
                unit: Rat::from(poly.coeff(0)),
                factors: Vec::new(),
            }
        } else {
            factor_over_q(&poly)?
        };
        let mut verdicts = Vec::new();
        for (g, _) in &factorization.factors {
            let verdict = match unequal_degree_witness(g, FAST_PATH_PMAX) {
                Some((p, degrees)) => GaloisVerdict::NonAbelian {
                    witness: NonAbelianWitness::UnequalDegrees { p, degrees },
                },
                None => is_abelian_galois(g)?,
            };
            verdicts.push(verdict);
        }
        let level_abelian = verdicts.iter().all(|v| v.is_abelian());
        levels.push(TowerLevel {
            n,
            poly,
            infinity_multiplicity,
            factorization,
            verdicts,
            level_abelian,
        });
        if !level_abelian {
            break;
        }
    }
    Ok(levels)
}

/// Chebyshev polynomial normalized by T_d(x + 1/x) = x^d + 1/x^d:
/// T_0 = 2, T_1 = x, T_{d+1} = x T_d - T_{d-1}.
pub fn chebyshev(d: u32) -> IntPoly {
    let mut prev = IntPoly::constant(BigInt::from(2));
    let mut cur = IntPoly::x();
    if d == 0 {
        return prev;
    }
    let x = IntPoly::x();
    for _ in 1..d {
        let next = x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyTag {
    /// f = c (x - beta)^d + beta, affinely conjugate to a scaled power map.
    Powering { beta: Rat, c: Rat },
    /// Affinely conjugate to T_d.
    ChebyshevPlus,
    /// Affinely conjugate to -T_d (distinct from +T_d only for odd d).
    ChebyshevMinus,
    None,
}

fn poly_of(f: &RationalMap) -> QPoly {
    assert!(f.is_polynomial());
    let c = Rat::from(f.q().coeff(0));
    QPoly::from_int(f.p()).mul_scalar(&c.recip())
}

fn qpoly_pow(base: &QPoly, e: usize) -> QPoly {
    let mut acc = QPoly::one();
    for _ in 0..e {
        acc = acc.mul(base);
    }
    acc
}

/// Membership in the exceptional families of polynomial maps, checked
/// exactly: powering forms first (beta and c are forced by f', so this is
/// a single identity test), then Chebyshev conjugacy.
pub fn detect_family(f: &RationalMap) -> FamilyTag {
    if !f.is_polynomial() {
        return FamilyTag::None;
    }
    let d = f.degree();
    let fp = poly_of(f);
    let der = fp.derivative();
    // A powering form has f' = c d (x - beta)^{d-1}, so beta is read off
    // the two leading coefficients of f'.
    let beta = -der.coeff(d - 2)
        / (der.lc() * rat_int(i64::try_from(d - 1).expect("degree fits in i64")));
    let c = fp.lc();
    let shifted = QPoly::from_coeffs(vec![-beta.clone(), rat_int(1)]);
    let model = qpoly_pow(&shifted, d)
        .mul_scalar(&c)
        .add(&QPoly::constant(beta.clone()));
    if model == fp {
        return FamilyTag::Powering { beta, c };
    }
    let td = RationalMap::from_poly(&chebyshev(d as u32)).expect("T_d is a valid map");
    if !affine_conjugators(f, &td).is_empty() {
        return FamilyTag::ChebyshevPlus;
    }
    let tdm = RationalMap::from_poly(&chebyshev(d as u32).neg()).expect("-T_d is a valid map");
    if !affine_conjugators(f, &tdm).is_empty() {
        return FamilyTag::ChebyshevMinus;
    }
    FamilyTag::None
}

/// An affine map phi(x) = a x + b with algebraic coefficients, presented
/// inside L = Q[t]/(field): a and b are residues in t, pinned down
/// unambiguously by their minimal polynomials over Q together with the
/// index of the corresponding root in the sorted linear factors of that
/// minimal polynomial over L.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMapAlg {
    pub field: IntPoly,
    pub a: QPoly,
    pub b: QPoly,
    pub a_minpoly: IntPoly,
    pub a_root_index: usize,
    pub b_minpoly: IntPoly,
    pub b_root_index: usize,
}

impl AffineMapAlg {
    pub fn field_degree(&self) -> usize {
        self.field.deg()
    }

    pub fn is_rational(&self) -> bool {
        self.field.deg() == 1
    }
}

fn element_coords(e: &QPoly, n: usize) -> Vec<Rat> {
    (0..n).map(|i| e.coeff(i)).collect()
}

/// Minimal polynomial over Q of an element of L = Q[t]/(defining), via the
/// first linear dependency among its powers (tracked with an augmented
/// echelon form). Primitive with positive leading coefficient.
fn element_minpoly(nf: &NumberField, e: &QPoly) -> IntPoly {
    let n = nf.degree();
    // rows: (reduced coordinate vector, pivot column, combination over powers)
    let mut rows: Vec<(Vec<Rat>, usize, Vec<Rat>)> = Vec::new();
    let mut power = QPoly::one();
    for j in 0..=n {
        let mut vec_f = element_coords(&power, n);
        let mut combo = vec![rat_int(0); n + 1];
        combo[j] = rat_int(1);
        for (rf, pivot, rc) in &rows {
            if !vec_f[*pivot].is_zero() {
                let factor = vec_f[*pivot].clone() / rf[*pivot].clone();
                for i in 0..n {
                    vec_f[i] = vec_f[i].clone() - factor.clone() * rf[i].clone();
                }
                for i in 0..=n {
                    combo[i] = combo[i].clone() - factor.clone() * rc[i].clone();
                }
            }
        }
        match vec_f.iter().position(|c| !c.is_zero()) {
            Some(pivot) => {
                rows.push((vec_f, pivot, combo));
                power = nf.mul(&power, e);
            }
            None => {
                let qp = QPoly::from_coeffs(combo[..=j].to_vec());
                return qp.clear_denominators().primitive_normalized();
            }
        }
    }
    unreachable!("powers of a degree-n field element are dependent by step n");
}

/// Roots of h inside L, read from the sorted monic linear factors of h
/// over L. The sort order is the canonical one used by the factorizer, so
/// positions are stable identifiers.
fn nf_roots_of(nf: &NumberField, h: &IntPoly) -> Result<Vec<QPoly>, FactorError> {
    let fac = factor_over_nf(h, nf)?;
    Ok(fac
        .factors
        .iter()
        .filter(|(g, _)| g.deg() == 1 && g.is_monic())
        .map(|(g, _)| g.coeff(0).neg())
        .collect())
}

fn embed_qpoly(poly: &QPoly) -> NfPoly {
    NfPoly::from_coeffs(
        poly.coeffs()
            .iter()
            .map(|c| QPoly::constant(c.clone()))
            .collect(),
    )
}

fn np_eval_qpoly(nf: &NumberField, poly: &QPoly, at: &NfPoly) -> NfPoly {
    let mut acc = NfPoly::zero();
    for c in poly.coeffs().iter().rev() {
        acc = nf.np_mul(&acc, at);
        acc = nf.np_add(&acc, &NfPoly::from_coeffs(vec![QPoly::constant(c.clone())]));
    }
    acc
}

/// All affine phi = a x + b with f(phi(x)) = a g(x) + b, i.e. conjugations
/// carrying g to f, over every number field where one exists. Comparing
/// leading coefficients forces a^{d-1} = lc(g)/lc(f) and makes b a fixed
/// Q-linear expression in a, so the search space is the root set of one
/// scaling polynomial; each candidate is confirmed by the full identity
/// in L[x]. Both maps must be polynomial of the same degree d >= 2.
pub fn affine_conjugators(f: &RationalMap, g: &RationalMap) -> Vec<AffineMapAlg> {
    assert!(f.is_polynomial() && g.is_polynomial());
    let d = f.degree();
    assert!(g.degree() == d, "conjugate maps share a degree");
    let fp = poly_of(f);
    let gp = poly_of(g);
    let ratio = gp.lc() / fp.lc();
    // a^{d-1} - lc(g)/lc(f) = 0
    let mut scaling_coeffs = vec![rat_int(0); d];
    scaling_coeffs[0] = -ratio.clone();
    scaling_coeffs[d - 1] = rat_int(1);
    let scaling = QPoly::from_coeffs(scaling_coeffs).clear_denominators();
    let b_slope = gp.coeff(d - 1) / (rat_int(d as i64) * gp.lc());
    let b_offset = -(fp.coeff(d - 1) * ratio) / (rat_int(d as i64) * gp.lc());
    let factors = factor_over_q(&scaling)
        .expect("scaling polynomial is tiny")
        .factors;
    let mut out = Vec::new();
    for (h, _) in &factors {
        let nf = NumberField::new(h);
        let roots = nf_roots_of(&nf, h).expect("factoring h over its own field");
        let g_emb = embed_qpoly(&gp);
        for a in roots {
            let b = a
                .mul_scalar(&b_slope)
                .add(&QPoly::constant(b_offset.clone()));
            let phi = NfPoly::from_coeffs(vec![b.clone(), a.clone()]);
            let lhs = np_eval_qpoly(&nf, &fp, &phi);
            let rhs = nf.np_add(
                &nf.np_mul_elem(&g_emb, &a),
                &NfPoly::from_coeffs(vec![b.clone()]),
            );
            if lhs != rhs {
                continue;
            }
            let a_minpoly = element_minpoly(&nf, &a);
            let b_minpoly = element_minpoly(&nf, &b);
            let a_root_index = nf_roots_of(&nf, &a_minpoly)
                .expect("factoring a minpoly")
                .iter()
                .position(|r| *r == a)
                .expect("a is a root of its own minimal polynomial");
            let b_root_index = nf_roots_of(&nf, &b_minpoly)
                .expect("factoring b minpoly")
                .iter()
                .position(|r| *r == b)
                .expect("b is a root of its own minimal polynomial");
            out.push(AffineMapAlg {
                field: h.clone(),
                a,
                b,
                a_minpoly,
                a_root_index,
                b_minpoly,
                b_root_index,
            });
        }
    }
    out
}

/// First nonabelian factor in a tower, located by level and position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerWitness {
    pub level: u32,
    pub factor: IntPoly,
    pub witness: NonAbelianWitness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub map: String,
    pub point: String,
    pub prime: Place,
    pub report: ConditionReport,
    pub local_evidence: Vec<PadicInt>,
    pub tower_levels: Vec<TowerLevel>,
    pub tower_evidence: Option<TowerWitness>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("map is not postcritically finite")]
    NotPcf,
    #[error("base point is exceptional")]
    ExceptionalBase,
    #[error("base point is preperiodic; the construction needs a wandering point")]
    PreperiodicBase,
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("conditions fail at p = {p}: {failed:?}")]
    ConditionsFail { p: u64, failed: Vec<&'static str> },
    #[error(transparent)]
    Local(#[from] PadicError),
    #[error("tower analysis failed: {0}")]
    Tower(String),
    #[error("no prime up to {pmax} satisfies all conditions")]
    NoWitnessFound {
        pmax: u64,
        reasons: Vec<(u64, Vec<&'static str>)>,
    },
}

fn clamp_levels(d: usize, n_max: u32) -> u32 {
    let mut n = 0;
    let mut dn = 1usize;
    while n < n_max {
        match dn.checked_mul(d) {
            Some(next) if next <= TOWER_DEGREE_CAP => {
                dn = next;
                n += 1;
            }
            _ => break,
        }
    }
    n
}

fn first_nonabelian(levels: &[TowerLevel]) -> Option<TowerWitness> {
    for level in levels {
        for ((g, _), verdict) in level.factorization.factors.iter().zip(&level.verdicts) {
            if let GaloisVerdict::NonAbelian { witness } = verdict {
                return Some(TowerWitness {
                    level: level.n,
                    factor: g.clone(),
                    witness: witness.clone(),
                });
            }
        }
    }
    None
}

/// Certificate for a specific prime: conditions report, backward orbit to
/// the requested depth and precision, and the tower analysis. Errors if
/// any condition fails at this prime.
fn certificate_at_prime(
    f: &RationalMap,
    alpha: &ProjPointQ,
    v: Place,
    n_levels: u32,
    m: u32,
    k: u32,
) -> Result<WitnessCertificate, WitnessError> {
    let cert = pcf_certify(f)?;
    if !cert.is_pcf {
        return Err(WitnessError::NotPcf);
    }
    let report = check_conditions(f, alpha, v, &cert);
    if !report.all_pass() {
        return Err(WitnessError::ConditionsFail {
            p: v.p,
            failed: report.failed(),
        });
    }
    let local_evidence = backward_orbit_local(f, alpha, v, m, k)?;
    let n_eff = clamp_levels(f.degree(), n_levels);
    let tower_levels = if n_eff >= 1 {
        analyze_tower(f, alpha, n_eff).map_err(|e| WitnessError::Tower(e.to_string()))?
    } else {
        Vec::new()
    };
    let tower_evidence = first_nonabelian(&tower_levels);
    Ok(WitnessCertificate {
        map: f.canonical_string(),
        point: alpha.display_string(),
        prime: v,
        report,
        local_evidence,
        tower_levels,
        tower_evidence,
    })
}

/// Scan primes <= pmax for the smallest one passing conditions (A)-(E)
/// with a unit multiplier, then assemble the full certificate there:
/// p-adic backward orbit plus tower verdicts down to n_max levels
/// (clamped to the degree cap). The base must be a wandering,
/// non-exceptional point of a postcritically finite map.
pub fn witness_pipeline(
    f: &RationalMap,
    alpha: &ProjPointQ,
    pmax: u64,
    n_max: u32,
) -> Result<WitnessCertificate, WitnessError> {
    let cert = pcf_certify(f)?;
    if !cert.is_pcf {
        return Err(WitnessError::NotPcf);
    }
    if is_exceptional(f, alpha) {
        return Err(WitnessError::ExceptionalBase);
    }
    if classify_orbit(f, alpha).is_preperiodic() {
        return Err(WitnessError::PreperiodicBase);
    }
    let reports: Vec<(u64, ConditionReport)> = primes_up_to(pmax)
        .into_par_iter()
        .map(|p| (p, check_conditions(f, alpha, Place::new(p), &cert)))
        .collect();
    match reports.iter().find(|(_, r)| r.all_pass()) {
        Some((p, _)) => certificate_at_prime(
            f,
            alpha,
            Place::new(*p),
            n_max,
            WITNESS_BACKWARD_LEVELS,
            WITNESS_PRECISION,
        ),
        None => Err(WitnessError::NoWitnessFound {
            pmax,
            reasons: reports
                .into_iter()
                .map(|(p, r)| (p, r.failed()))
                .collect(),
        }),
    }
}

fn verdict_json(verdict: &GaloisVerdict) -> (&'static str, Option<String>) {
    match verdict {
        GaloisVerdict::Abelian { .. } => ("abelian", None),
        GaloisVerdict::NonAbelian { witness } => {
            let w = match witness {
                NonAbelianWitness::NotNormal => "not-normal".to_string(),
                NonAbelianWitness::NonCommutingPair { i, j } => {
                    format!("non-commuting-pair {} {}", i, j)
                }
                NonAbelianWitness::UnequalDegrees { p, degrees } => {
                    let ds: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
                    format!("unequal-degrees p={} degrees=[{}]", p, ds.join(","))
                }
            };
            ("nonabelian", Some(w))
        }
    }
}

impl WitnessCertificate {
    /// Stable JSON form. Big integers (lift residues, the cycle
    /// multiplier) are decimal strings; counters are numbers.
    pub fn to_json(&self) -> serde_json::Value {
        let cycle = self
            .report
            .cycle
            .as_ref()
            .expect("a passing report carries its cycle");
        json!({
            "map": self.map,
            "point": self.point,
            "prime": self.prime.p,
            "conditions": {
                "A": self.report.a_char,
                "B": self.report.b_good_reduction,
                "C": self.report.c_integral,
                "D": self.report.d_periodic,
                "E": self.report.e_avoids_critical,
                "unit_multiplier": self.report.unit_multiplier,
            },
            "cycle": {
                "tail": cycle.tail,
                "period": cycle.period,
                "multiplier": cycle.multiplier.to_string(),
            },
            "lifts": self
                .local_evidence
                .iter()
                .map(|x| {
                    json!({
                        "precision": x.precision(),
                        "residue": x.residue().to_string(),
                    })
                })
                .collect::<Vec<_>>(),
            "tower": self
                .tower_levels
                .iter()
                .map(|level| {
                    json!({
                        "level": level.n,
                        "factors": level
                            .factorization
                            .factors
                            .iter()
                            .zip(&level.verdicts)
                            .map(|((g, _), v)| {
                                let (verdict, witness) = verdict_json(v);
                                json!({
                                    "poly": g.to_string(),
                                    "verdict": verdict,
                                    "witness": witness,
                                })
                            })
                            .collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

/// Recompute a certificate from the map and point named in the JSON, at
/// the recorded prime, depth, and precision, and require the recomputed
/// JSON to match field for field. A `tool` header field, if present, is
/// outside the certificate proper and is ignored.
pub fn verify_certificate_json(emitted: &serde_json::Value) -> Result<(), String> {
    let mut stripped;
    let value = match emitted.as_object() {
        Some(obj) if obj.contains_key("tool") => {
            stripped = emitted.clone();
            stripped.as_object_mut().unwrap().remove("tool");
            &stripped
        }
        _ => emitted,
    };
    let map_str = value["map"].as_str().ok_or("missing map")?;
    let point_str = value["point"].as_str().ok_or("missing point")?;
    let p = value["prime"].as_u64().ok_or("missing prime")?;
    let lifts = value["lifts"].as_array().ok_or("missing lifts")?;
    if lifts.is_empty() {
        return Err("empty lift chain".to_string());
    }
    let m = (lifts.len() - 1) as u32;
    let k = lifts[0]["precision"]
        .as_u64()
        .ok_or("missing lift precision")? as u32;
    let n_levels = value["tower"]
        .as_array()
        .ok_or("missing tower")?
        .iter()
        .filter_map(|l| l["level"].as_u64())
        .max()
        .unwrap_or(0) as u32;
    let f = parse_map(map_str).map_err(|e| e.to_string())?;
    let alpha = ProjPointQ::parse(point_str).ok_or("unparseable point")?;
    let recomputed = certificate_at_prime(&f, &alpha, Place::new(p), n_levels, m, k)
        .map_err(|e| e.to_string())?;
    let rejson = recomputed.to_json();
    if rejson == *value {
        Ok(())
    } else {
        Err(format!(
            "recomputed certificate disagrees:\n{}\n!=\n{}",
            rejson, value
        ))
    }
}

/// Convenience wrapper: serialize and re-verify from scratch.
pub fn verify_certificate(cert: &WitnessCertificate) -> Result<(), String> {
    verify_certificate_json(&cert.to_json())
}
