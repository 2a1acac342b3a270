//! p-adic local dynamics on residue discs: the projective metric, the
//! attracting/unit-surjective disc dichotomy, Hensel-Newton preimage
//! lifting, and backward orbits inside the disc of a periodic residue.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactcore::map::RationalMap;
use crate::exactcore::point::ProjPointQ;
use crate::exactcore::poly::IntPoly;
use crate::exactcore::rat::Rat;
use crate::residue::{orbit_mod_p, reduce_map, Place, ReducedMap};
use crate::util::valuation_big;

/// Hard ceiling on working precision (exponent of p). Distinctness-driven
/// precision raising stops here.
pub const PRECISION_CAP: u32 = 1 << 12;

/// An element of Z_p known modulo p^k: the residue is the canonical
/// representative in [0, p^k).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u64,
    k: u32,
    residue: BigInt,
}

impl PadicInt {
    pub fn new(p: u64, k: u32, value: &BigInt) -> Self {
        assert!(k >= 1, "precision must be positive");
        let m = BigInt::from(p).pow(k);
        PadicInt {
            p,
            k,
            residue: value.mod_floor(&m),
        }
    }

    pub fn from_u64(p: u64, k: u32, value: u64) -> Self {
        Self::new(p, k, &BigInt::from(value))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> BigInt {
        BigInt::from(self.p).pow(self.k)
    }

    /// The image in Z/p^j for j <= k.
    pub fn truncate(&self, j: u32) -> PadicInt {
        assert!(j <= self.k);
        PadicInt::new(self.p, j, &self.residue)
    }

    pub fn residue_mod_p(&self) -> u64 {
        let r = self.residue.mod_floor(&BigInt::from(self.p));
        let (_, digits) = r.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }

    /// Congruent modulo p^min(k, other.k).
    pub fn agrees_with(&self, other: &PadicInt) -> bool {
        assert_eq!(self.p, other.p);
        let j = self.k.min(other.k);
        self.truncate(j).residue == other.truncate(j).residue
    }
}

impl std::fmt::Display for PadicInt {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "{} + O({}^{})", self.residue, self.p, self.k)
    }
}

impl std::fmt::Debug for PadicInt {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "{}", self)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("requested precision {k} exceeds the cap {cap}")]
    PrecisionOverflow { k: u32, cap: u32 },
    #[error("Hensel conditions fail at p = {p}: {reason}")]
    HenselFailure { p: u64, reason: String },
    #[error("precondition fails at p = {p}: {reason}")]
    Precondition { p: u64, reason: String },
}

/// Behaviour of a map on a fixed residue disc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiscClass {
    /// The disc is not fixed by the reduced map.
    NotFixed,
    /// Attracting: the derivative vanishes mod p and the disc contracts
    /// onto a unique fixed point, given to the requested precision.
    Attracting { fixed_point: PadicInt },
    /// The derivative is a unit: the disc maps onto itself bijectively.
    UnitSurjective,
}

/// The projective metric at v:
/// |x1 y2 - x2 y1|_v / (max(|x1|,|x2|)_v * max(|y1|,|y2|)_v).
/// For coprime integer coordinates both maxima are 1, so this is
/// |det|_v; values lie in {0} U { p^-j : j >= 0 }, and distinct points
/// are at distance 1 exactly when their reductions differ.
pub fn proj_metric(x: &ProjPointQ, y: &ProjPointQ, v: Place) -> Rat {
    let det = x.x1() * y.x2() - x.x2() * y.x1();
    if det.is_zero() {
        return Rat::zero();
    }
    let val = valuation_big(&det, v.p);
    Rat::new(BigInt::one(), BigInt::from(v.p).pow(val))
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "non-unit inverse mod {}", m);
    e.x.mod_floor(m)
}

fn eval_mod(f: &IntPoly, x: &BigInt, m: &BigInt) -> BigInt {
    if f.is_zero() {
        return BigInt::zero();
    }
    let mut acc = BigInt::zero();
    for c in f.coeffs().iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

/// Classifies the dynamics of f on the fixed residue disc D(residue),
/// computing the attracting fixed point to precision k when applicable.
/// Residue p encodes the disc at infinity (handled in the 1/x chart).
///
/// Requires good reduction at v and residue <= p.
pub fn classify_fixed_disc(
    f: &RationalMap,
    v: Place,
    residue: u64,
    k: u32,
) -> Result<DiscClass, PadicError> {
    if k > PRECISION_CAP {
        return Err(PadicError::PrecisionOverflow {
            k,
            cap: PRECISION_CAP,
        });
    }
    assert!(residue <= v.p, "residue out of range for P^1(F_p)");
    let (f, residue) = if residue == v.p {
        (f.conj_by_inversion(), 0)
    } else {
        (f.clone(), residue)
    };
    let fbar = reduce_map(&f, v).unwrap_or_else(|e| panic!("{}", e));
    if fbar.step(residue) != residue {
        return Ok(DiscClass::NotFixed);
    }
    if fbar.step_derivative(residue) != 0 {
        return Ok(DiscClass::UnitSurjective);
    }
    // Banach: each application of f contracts the disc by at least 1/p,
    // so k iterations pin the fixed point mod p^k.
    let m = BigInt::from(v.p).pow(k);
    let pnum = f.p().clone();
    let qden = f.q().clone();
    let pbig = BigInt::from(v.p);
    let mut x = BigInt::from(residue);
    for _ in 0..k {
        let qv = eval_mod(&qden, &x, &m);
        debug_assert!(!(&qv % &pbig).is_zero());
        x = (eval_mod(&pnum, &x, &m) * modinv(&qv, &m)).mod_floor(&m);
    }
    // Fixed to the requested precision.
    let qv = eval_mod(&qden, &x, &m);
    debug_assert_eq!(
        (eval_mod(&pnum, &x, &m) * modinv(&qv, &m)).mod_floor(&m),
        x
    );
    Ok(DiscClass::Attracting {
        fixed_point: PadicInt::new(v.p, k, &x),
    })
}

/// Newton iteration for a root of F mod p^k from a simple seed root mod p
/// (F(seed) = 0 mod p, F'(seed) a unit). Quadratic convergence; the seed
/// conditions are checked by the callers.
fn newton_root(fpoly: &IntPoly, p: u64, k: u32, seed: u64) -> BigInt {
    let m = BigInt::from(p).pow(k);
    let deriv = fpoly.derivative();
    let mut x = BigInt::from(seed);
    for _ in 0..64 {
        let fx = eval_mod(fpoly, &x, &m);
        if fx.is_zero() {
            return x;
        }
        let dx = eval_mod(&deriv, &x, &m);
        x = (&x - fx * modinv(&dx, &m)).mod_floor(&m);
    }
    let fx = eval_mod(fpoly, &x, &m);
    assert!(fx.is_zero(), "Newton failed to converge at p = {}", p);
    x
}

/// Lifts the preimage of `target` under f inside the disc D(seed_residue)
/// to precision k: returns gamma with f(gamma) = target mod p^k. The
/// target's residue representative is used as an exact integer. Requires
/// good reduction; fails (reported) when fbar(seed) misses the target's
/// residue or the local derivative is not a unit.
pub fn hensel_lift_preimage(
    f: &RationalMap,
    v: Place,
    target: &PadicInt,
    seed_residue: u64,
    k: u32,
) -> Result<PadicInt, PadicError> {
    if k > PRECISION_CAP {
        return Err(PadicError::PrecisionOverflow {
            k,
            cap: PRECISION_CAP,
        });
    }
    assert_eq!(target.p(), v.p);
    assert!(seed_residue < v.p, "seed must be a finite residue");
    let fbar = reduce_map(f, v).unwrap_or_else(|e| panic!("{}", e));
    if fbar.step(seed_residue) != target.residue_mod_p() {
        return Err(PadicError::HenselFailure {
            p: v.p,
            reason: format!(
                "seed {} maps to {} mod p, not to the target residue {}",
                seed_residue,
                fbar.step(seed_residue),
                target.residue_mod_p()
            ),
        });
    }
    // F(x) = p(x) - t q(x); F'(seed) = fbar'(seed) * qbar(seed) up to units.
    if fbar.step_derivative(seed_residue) == 0 {
        return Err(PadicError::HenselFailure {
            p: v.p,
            reason: format!("derivative vanishes mod p at the seed {}", seed_residue),
        });
    }
    let t = target.residue().clone();
    let fpoly = f.p().sub(&f.q().mul(&IntPoly::constant(t)));
    let x = newton_root(&fpoly, v.p, k, seed_residue);
    Ok(PadicInt::new(v.p, k, &x))
}

/// Orbit evaluation mod p^K that follows the point through charts: the
/// value is kept affine, switching to the 1/x chart across the disc at
/// infinity. Good reduction keeps every chart denominator a unit.
struct LocalStepper {
    m: BigInt,
    pbig: BigInt,
    pnum: IntPoly,
    qden: IntPoly,
    wr: IntPoly,
    prev: IntPoly,
    qrev: IntPoly,
    wrev: IntPoly,
}

impl LocalStepper {
    fn new(f: &RationalMap, p: u64, m: BigInt) -> Self {
        let d = f.degree();
        let prev = IntPoly::from_coeffs(f.homog_p().iter().rev().cloned().collect());
        let qrev = IntPoly::from_coeffs(f.homog_q().iter().rev().cloned().collect());
        let wrev = prev.derivative().mul(&qrev).sub(&prev.mul(&qrev.derivative()));
        debug_assert_eq!(prev.coeffs().len().max(qrev.coeffs().len()), d + 1);
        LocalStepper {
            pbig: BigInt::from(p),
            m,
            pnum: f.p().clone(),
            qden: f.q().clone(),
            wr: f.wronskian(),
            prev,
            qrev,
            wrev,
        }
    }

    /// Applies f^n to an affine value in the standard chart, returning
    /// (f^n(x), (f^n)'(x)) mod p^K. The start and end discs must be
    /// finite; intermediate passes through infinity are chart-switched.
    fn apply_n(&self, x0: &BigInt, n: u32) -> (BigInt, BigInt) {
        let mut z = x0.clone();
        let mut inverted = false;
        let mut deriv = BigInt::one();
        for _ in 0..n {
            let (num, den, wron) = if inverted {
                (&self.prev, &self.qrev, &self.wrev)
            } else {
                (&self.pnum, &self.qden, &self.wr)
            };
            let nv = eval_mod(num, &z, &self.m);
            let dv = eval_mod(den, &z, &self.m);
            let wv = eval_mod(wron, &z, &self.m);
            if (&dv % &self.pbig).is_zero() {
                // Image lands in the disc at infinity: switch chart.
                let inv = modinv(&nv, &self.m);
                deriv = (deriv * (&self.m - wv) * (&inv * &inv)).mod_floor(&self.m);
                z = (dv * inv).mod_floor(&self.m);
                inverted = true;
            } else {
                let inv = modinv(&dv, &self.m);
                deriv = (deriv * wv * (&inv * &inv)).mod_floor(&self.m);
                z = (nv * inv).mod_floor(&self.m);
                inverted = false;
            }
        }
        assert!(!inverted, "orbit must end in a finite disc");
        (z, deriv)
    }
}

/// Level-by-level backward orbit of alpha inside the disc of its periodic
/// residue: returns [alpha_0, ..., alpha_m] with alpha_0 = alpha and
/// f^n(alpha_{j+1}) = alpha_j mod p^k, n the period of the reduced point.
/// All entries lie in D(alpha bar) and are pairwise distinct; precision is
/// raised geometrically (up to the cap) if needed to separate them.
///
/// Preconditions checked here: good reduction, alpha integral, reduced
/// point periodic, unit cycle multiplier.
pub fn backward_orbit_local(
    f: &RationalMap,
    alpha: &ProjPointQ,
    v: Place,
    m: u32,
    k: u32,
) -> Result<Vec<PadicInt>, PadicError> {
    if k > PRECISION_CAP {
        return Err(PadicError::PrecisionOverflow {
            k,
            cap: PRECISION_CAP,
        });
    }
    let p = v.p;
    let (f, alpha) = if alpha.is_infinity() {
        (f.conj_by_inversion(), ProjPointQ::from_int(0))
    } else {
        (f.clone(), alpha.clone())
    };
    let fbar = reduce_map(&f, v).map_err(|e| PadicError::Precondition {
        p,
        reason: format!("(B) fails at {}: {}", p, e),
    })?;
    if (alpha.x2() % &BigInt::from(p)).is_zero() {
        return Err(PadicError::Precondition {
            p,
            reason: format!("(C) fails at {}: alpha is not integral", p),
        });
    }
    let abar = alpha.reduce_mod(p);
    let cy = orbit_mod_p(&fbar, abar);
    if cy.tail != 0 {
        return Err(PadicError::Precondition {
            p,
            reason: format!("(D) fails at {}: reduced point has tail {}", p, cy.tail),
        });
    }
    if cy.multiplier == 0 {
        return Err(PadicError::Precondition {
            p,
            reason: format!("unit multiplier fails at {}: cycle is attracting", p),
        });
    }
    let n = cy.period;

    let mut kw = k.max(1);
    loop {
        let levels = backward_levels(&f, &fbar, &alpha, abar, n, m, kw);
        let mut distinct = true;
        'outer: for i in 0..levels.len() {
            for j in 0..i {
                if levels[i] == levels[j] {
                    distinct = false;
                    break 'outer;
                }
            }
        }
        if distinct {
            return Ok(levels);
        }
        let next = kw.saturating_mul(2);
        if next > PRECISION_CAP {
            return Err(PadicError::PrecisionOverflow {
                k: next,
                cap: PRECISION_CAP,
            });
        }
        kw = next;
    }
}

fn backward_levels(
    f: &RationalMap,
    fbar: &ReducedMap,
    alpha: &ProjPointQ,
    abar: u64,
    n: u32,
    m: u32,
    kw: u32,
) -> Vec<PadicInt> {
    let p = fbar.p();
    let modulus = BigInt::from(p).pow(kw);
    let stepper = LocalStepper::new(f, p, modulus.clone());
    let a0 = (alpha.x1() * modinv(&alpha.x2().mod_floor(&modulus), &modulus)).mod_floor(&modulus);
    let mut levels = vec![PadicInt::new(p, kw, &a0)];
    let mut target = a0;
    for _ in 0..m {
        // Solve f^n(x) = target on D(abar) by Newton; the chain-rule
        // derivative reduces to the unit cycle multiplier, so each step
        // at least doubles the valuation of the defect.
        let mut x = BigInt::from(abar);
        let mut converged = false;
        for _ in 0..64 {
            let (gx, gdx) = stepper.apply_n(&x, n);
            let defect = (gx - &target).mod_floor(&modulus);
            if defect.is_zero() {
                converged = true;
                break;
            }
            x = (&x - defect * modinv(&gdx, &modulus)).mod_floor(&modulus);
        }
        assert!(converged, "Hensel lifting cannot fail on a unit-multiplier cycle");
        levels.push(PadicInt::new(p, kw, &x));
        target = x;
    }
    levels
}
