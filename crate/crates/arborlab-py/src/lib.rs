//! Python bindings: thin wrappers that keep all arithmetic exact on the Rust
//! side and hand Python plain strings, ints, and dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyNone};

use arborlab::galois::{factor_over_q, is_abelian_galois, GaloisVerdict, NonAbelianWitness};
use arborlab::{
    parse_map, parse_poly, FamilyTag, IntPoly, OrbitClass, Place, ProjPointQ, RationalMap,
};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(s: &str) -> PyResult<ProjPointQ> {
    ProjPointQ::parse(s)
        .ok_or_else(|| PyValueError::new_err(format!("not a rational point or 'inf': {s}")))
}

fn place(p: u64) -> PyResult<Place> {
    if !arborlab::util::is_prime(p) {
        return Err(PyValueError::new_err(format!("{p} is not prime")));
    }
    Ok(Place::new(p))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        serde_json::Value::Null => PyNone::get(py).to_owned().into_any(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap().into_pyobject(py)?.into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any()
        }
    })
}

/// A rational self-map of P^1 over Q, of degree >= 2.
#[pyclass(frozen)]
struct Map {
    inner: RationalMap,
}

#[pymethods]
impl Map {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        Ok(Map {
            inner: parse_map(expr).map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Map({:?})", self.inner.canonical_string())
    }

    fn __str__(&self) -> String {
        self.inner.canonical_string()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn is_polynomial(&self) -> bool {
        self.inner.is_polynomial()
    }

    /// Exact image of a point, as a display string ("a/b" or "inf").
    fn eval(&self, pt: &str) -> PyResult<String> {
        Ok(self.inner.eval(&point(pt)?).display_string())
    }

    fn iterate(&self, n: u32) -> Map {
        Map {
            inner: self.inner.iterate(n),
        }
    }

    fn compose(&self, other: &Map) -> Map {
        Map {
            inner: self.inner.compose(&other.inner),
        }
    }
}

/// Orbit type of a point: {"kind": "preperiodic", "tail", "period"} or
/// {"kind": "wandering", "escape_index", "escape_height"}.
#[pyfunction]
fn classify_orbit<'py>(py: Python<'py>, map: &Map, pt: &str) -> PyResult<Bound<'py, PyAny>> {
    let v = match arborlab::classify_orbit(&map.inner, &point(pt)?) {
        OrbitClass::Preperiodic { tail, period } => serde_json::json!({
            "kind": "preperiodic", "tail": tail, "period": period,
        }),
        OrbitClass::Wandering {
            escape_index,
            escape_height,
        } => serde_json::json!({
            "kind": "wandering", "escape_index": escape_index, "escape_height": escape_height,
        }),
    };
    json_to_py(py, &v)
}

/// Postcritical-orbit certificate: is_pcf, the stabilized (or escaping)
/// push-forward steps, and the largest critical period m.
#[pyfunction]
fn pcf_certify<'py>(py: Python<'py>, map: &Map) -> PyResult<Bound<'py, PyAny>> {
    let cert = arborlab::pcf_certify(&map.inner).map_err(value_err)?;
    let steps: Vec<serde_json::Value> = cert
        .postcritical
        .iter()
        .map(|s| {
            serde_json::json!({
                "factors": s.factors().iter()
                    .map(|(g, e)| serde_json::json!([g.to_string(), e]))
                    .collect::<Vec<_>>(),
                "includes_infinity": s.includes_infinity(),
            })
        })
        .collect();
    json_to_py(
        py,
        &serde_json::json!({
            "is_pcf": cert.is_pcf,
            "postcritical_steps": steps,
            "critical_periods": cert.periodic_critical_periods,
            "m": cert.m,
        }),
    )
}

/// (value, error) for h(f^n(alpha)) / d^n.
#[pyfunction]
fn canonical_height(map: &Map, pt: &str, n: u32) -> PyResult<(f64, f64)> {
    let h = arborlab::canonical_height(&map.inner, &point(pt)?, n);
    Ok((h.value, h.error))
}

/// Primes up to pmax where the point reduces to a periodic point, with the
/// cycle length and multiplier of the reduced cycle.
#[pyfunction]
fn periodic_places<'py>(
    py: Python<'py>,
    map: &Map,
    pt: &str,
    pmax: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let rows: Vec<serde_json::Value> = arborlab::find_periodic_places(&map.inner, &point(pt)?, pmax)
        .iter()
        .map(|(v, c)| {
            serde_json::json!({
                "p": v.p, "period": c.period, "multiplier": c.multiplier,
            })
        })
        .collect();
    json_to_py(py, &serde_json::Value::Array(rows))
}

/// The local admissibility report at p: conditions A-E, the unit-multiplier
/// check, and the reduced cycle when it exists.
#[pyfunction]
fn check_conditions<'py>(
    py: Python<'py>,
    map: &Map,
    pt: &str,
    p: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cert = arborlab::pcf_certify(&map.inner).map_err(value_err)?;
    let r = arborlab::check_conditions(&map.inner, &point(pt)?, place(p)?, &cert);
    let cycle = r.cycle.as_ref().map(|c| {
        serde_json::json!({"tail": c.tail, "period": c.period, "multiplier": c.multiplier})
    });
    json_to_py(
        py,
        &serde_json::json!({
            "p": r.p,
            "A": r.a_char, "B": r.b_good_reduction, "C": r.c_integral,
            "D": r.d_periodic, "E": r.e_avoids_critical,
            "unit_multiplier": r.unit_multiplier,
            "all": r.all_pass(),
            "cycle": cycle,
        }),
    )
}

/// Backward orbit of the point under f^period, lifted to precision k at p;
/// entries are p-adic integers rendered as "r + O(p^k)".
#[pyfunction]
fn backward_orbit(map: &Map, pt: &str, p: u64, m: u32, k: u32) -> PyResult<Vec<String>> {
    let lifts = arborlab::backward_orbit_local(&map.inner, &point(pt)?, place(p)?, m, k)
        .map_err(value_err)?;
    Ok(lifts.iter().map(|w| w.to_string()).collect())
}

fn verdict_to_json(v: &GaloisVerdict) -> serde_json::Value {
    match v {
        GaloisVerdict::Abelian { root_maps } => serde_json::json!({
            "verdict": "abelian",
            "root_maps": root_maps.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        }),
        GaloisVerdict::NonAbelian { witness } => {
            let w = match witness {
                NonAbelianWitness::NotNormal => "not-normal".to_string(),
                NonAbelianWitness::NonCommutingPair { i, j } => {
                    format!("non-commuting-pair {i} {j}")
                }
                NonAbelianWitness::UnequalDegrees { p, degrees } => format!(
                    "unequal-degrees p={p} degrees=[{}]",
                    degrees
                        .iter()
                        .map(|d| d.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            };
            serde_json::json!({"verdict": "nonabelian", "witness": w})
        }
    }
}

/// Preimage-tower levels with one verdict per irreducible factor.
#[pyfunction]
fn analyze_tower<'py>(
    py: Python<'py>,
    map: &Map,
    pt: &str,
    levels: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let tower = arborlab::analyze_tower(&map.inner, &point(pt)?, levels).map_err(value_err)?;
    let rows: Vec<serde_json::Value> = tower
        .iter()
        .map(|lv| {
            let factors: Vec<serde_json::Value> = lv
                .factorization
                .factors
                .iter()
                .zip(&lv.verdicts)
                .map(|((g, _), v)| {
                    let mut row = verdict_to_json(v);
                    row["poly"] = serde_json::json!(g.to_string());
                    row
                })
                .collect();
            serde_json::json!({
                "level": lv.n,
                "poly": lv.poly.to_string(),
                "infinity_multiplicity": lv.infinity_multiplicity,
                "abelian": lv.level_abelian,
                "factors": factors,
            })
        })
        .collect();
    json_to_py(py, &serde_json::Value::Array(rows))
}

/// Full witness pipeline; returns the certificate as a JSON string.
#[pyfunction]
#[pyo3(signature = (map, pt, pmax=1000, levels=2))]
fn witness(map: &Map, pt: &str, pmax: u64, levels: u32) -> PyResult<String> {
    let cert = arborlab::witness_pipeline(&map.inner, &point(pt)?, pmax, levels)
        .map_err(value_err)?;
    Ok(cert.to_json().to_string())
}

/// Re-verifies an emitted witness certificate by recomputation.
#[pyfunction]
fn verify_witness(json: &str) -> PyResult<()> {
    let v: serde_json::Value = serde_json::from_str(json).map_err(value_err)?;
    arborlab::verify_certificate_json(&v).map_err(value_err)
}

/// The normalized degree-d Chebyshev polynomial, as a display string.
#[pyfunction]
fn chebyshev(d: u32) -> String {
    arborlab::chebyshev(d).to_string()
}

/// Detects scaled-powering or Chebyshev conjugacy; None for generic maps.
#[pyfunction]
fn detect_family<'py>(py: Python<'py>, map: &Map) -> PyResult<Bound<'py, PyAny>> {
    let v = match arborlab::detect_family(&map.inner) {
        FamilyTag::Powering { beta, c } => {
            serde_json::json!({"family": "powering", "beta": beta.to_string(), "c": c.to_string()})
        }
        FamilyTag::ChebyshevPlus => serde_json::json!({"family": "chebyshev"}),
        FamilyTag::ChebyshevMinus => serde_json::json!({"family": "negative-chebyshev"}),
        FamilyTag::None => serde_json::Value::Null,
    };
    json_to_py(py, &v)
}

/// All affine conjugations a x + b with f(a x + b) = a g(x) + b, each given
/// over the number field where its coefficients live.
#[pyfunction]
fn conjugators<'py>(py: Python<'py>, f: &Map, g: &Map) -> PyResult<Bound<'py, PyAny>> {
    if !f.inner.is_polynomial() || !g.inner.is_polynomial() {
        return Err(PyValueError::new_err("both maps must be polynomial"));
    }
    if f.inner.degree() != g.inner.degree() {
        return Err(PyValueError::new_err("conjugate maps share a degree"));
    }
    let rows: Vec<serde_json::Value> = arborlab::affine_conjugators(&f.inner, &g.inner)
        .iter()
        .map(|c| {
            serde_json::json!({
                "field": c.field.to_string(),
                "field_degree": c.field_degree(),
                "rational": c.is_rational(),
                "a": c.a.to_string(),
                "b": c.b.to_string(),
            })
        })
        .collect();
    json_to_py(py, &serde_json::Value::Array(rows))
}

/// Smallest prime set S making the points pairwise S-integral; the
/// archimedean place is always included and reported separately.
#[pyfunction]
fn minimal_s<'py>(py: Python<'py>, points: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    let mut xs = Vec::new();
    for s in &points {
        let pt = point(s)?;
        if xs.contains(&pt) {
            return Err(PyValueError::new_err(format!("duplicate point {s}")));
        }
        xs.push(pt);
    }
    let s = arborlab::minimal_s(&xs);
    json_to_py(
        py,
        &serde_json::json!({
            "archimedean": true,
            "primes": s.primes().collect::<Vec<_>>(),
        }),
    )
}

/// Exact projective distance at p, as a reduced fraction string.
#[pyfunction]
fn proj_metric(x: &str, y: &str, p: u64) -> PyResult<String> {
    Ok(arborlab::proj_metric(&point(x)?, &point(y)?, place(p)?).to_string())
}

/// Factorization over Q: {"unit": str, "factors": [[poly, exponent], ...]}.
#[pyfunction]
fn factor<'py>(py: Python<'py>, poly: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = parse_poly(poly).map_err(value_err)?;
    if g.is_zero() || g.deg() == 0 {
        return Err(PyValueError::new_err("need a polynomial of degree >= 1"));
    }
    let fac = factor_over_q(&g).map_err(value_err)?;
    json_to_py(
        py,
        &serde_json::json!({
            "unit": fac.unit.to_string(),
            "factors": fac.factors.iter()
                .map(|(h, e)| serde_json::json!([h.to_string(), e]))
                .collect::<Vec<_>>(),
        }),
    )
}

/// Exact abelian/nonabelian verdict for the splitting field of an
/// irreducible polynomial.
#[pyfunction]
fn is_abelian<'py>(py: Python<'py>, poly: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = parse_poly(poly).map_err(value_err)?;
    if g.is_zero() || g.deg() == 0 {
        return Err(PyValueError::new_err("need a polynomial of degree >= 1"));
    }
    let fac = factor_over_q(&g).map_err(value_err)?;
    if !fac.is_irreducible() {
        return Err(PyValueError::new_err(format!(
            "reducible over Q: {} factors",
            fac.factors.len()
        )));
    }
    let verdict = is_abelian_galois(&g).map_err(value_err)?;
    json_to_py(py, &verdict_to_json(&verdict))
}

/// Squarefree part helper used by the examples: the radical of a polynomial.
#[pyfunction]
fn squarefree_part(poly: &str) -> PyResult<String> {
    let g: IntPoly = parse_poly(poly).map_err(value_err)?;
    Ok(g.squarefree_part().to_string())
}

#[pymodule]
fn arborlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Map>()?;
    m.add_function(wrap_pyfunction!(classify_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(pcf_certify, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_height, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_places, m)?)?;
    m.add_function(wrap_pyfunction!(check_conditions, m)?)?;
    m.add_function(wrap_pyfunction!(backward_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_tower, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(chebyshev, m)?)?;
    m.add_function(wrap_pyfunction!(detect_family, m)?)?;
    m.add_function(wrap_pyfunction!(conjugators, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_s, m)?)?;
    m.add_function(wrap_pyfunction!(proj_metric, m)?)?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(is_abelian, m)?)?;
    m.add_function(wrap_pyfunction!(squarefree_part, m)?)?;
    Ok(())
}
