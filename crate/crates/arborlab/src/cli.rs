//! Command-line surface: one subcommand per library operation, with human
//! and byte-deterministic JSON output, the shared exit-code contract
//! (0 ok / 1 resource cap / 2 precondition / 64 usage), and the optional
//! on-disk factorization cache.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::exactcore::parse::parse_map;
use crate::exactcore::point::ProjPointQ;
use crate::exactcore::map::RationalMap;
use crate::exactcore::rat::rat_string;
use crate::galois::cache;
use crate::galois::numfield::{is_abelian_galois, GaloisVerdict, NonAbelianWitness};
use crate::galois::overq::factor_over_q;
use crate::integrality::minimal_s;
use crate::orbits::{classify_orbit, pcf_certify, OrbitClass, OrbitError};
use crate::padic::{backward_orbit_local, PadicError};
use crate::residue::{check_conditions, find_periodic_places, Place};
use crate::tower::{
    affine_conjugators, analyze_tower, detect_family, witness_pipeline, FamilyTag, TowerError,
    TowerLevel, WitnessError,
};
use crate::util::is_prime;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RESOURCE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "arborlab",
    version,
    about = "Exact dynamics of rational maps over Q: reduction, p-adic lifting, and Galois verdicts on preimage towers"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for the factorization cache (ARBORLAB_CACHE overrides).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads for prime scans (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Args)]
struct MapArg {
    /// Map expression, e.g. "x^2-2" or "(x^2+1)/x".
    #[arg(long, allow_hyphen_values = true)]
    map: String,
}

#[derive(Args)]
struct MapPoint {
    /// Map expression, e.g. "x^2-2" or "(x^2+1)/x".
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    /// Rational point "a/b", "a", or "inf".
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify postcritical finiteness.
    Pcf(MapArg),
    /// Classify the forward orbit of a point.
    Orbit(MapPoint),
    /// Primes of periodic reduction up to a bound.
    Places {
        #[command(flatten)]
        mp: MapPoint,
        #[arg(long, default_value_t = 1000)]
        pmax: u64,
    },
    /// Report conditions (A)-(E) and the cycle multiplier at one prime.
    Conditions {
        #[command(flatten)]
        mp: MapPoint,
        #[arg(long)]
        prime: u64,
    },
    /// Lift the backward orbit through p-adic residue discs.
    Lift {
        #[command(flatten)]
        mp: MapPoint,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[arg(long, default_value_t = 6)]
        precision: u32,
    },
    /// Factor preimage-tower levels and render Galois verdicts.
    Tower {
        #[command(flatten)]
        mp: MapPoint,
        #[arg(long, default_value_t = 2)]
        levels: u32,
    },
    /// Abelian-or-not verdict for one irreducible polynomial.
    Galois(MapArg),
    /// Detect powering and Chebyshev normal forms.
    Family(MapArg),
    /// Affine maps carrying one polynomial to another.
    Conj {
        /// Target polynomial f.
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// Source polynomial g; solutions phi satisfy f(phi(x)) = phi(g(x)).
        #[arg(long, allow_hyphen_values = true)]
        with: String,
    },
    /// Minimal set of primes making a point list pairwise integral.
    Sintegral {
        /// Rational point; repeat the flag for each member of the list.
        #[arg(long = "point", value_name = "POINT", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Scan primes, lift locally, analyze the tower: the full certificate.
    Witness {
        #[command(flatten)]
        mp: MapPoint,
        #[arg(long, default_value_t = 1000)]
        pmax: u64,
        #[arg(long, default_value_t = 2)]
        levels: u32,
    },
}

enum CliError {
    Usage(String),
    Precondition(String),
    Resource(String),
}

struct Output {
    human: String,
    payload: Value,
    command: &'static str,
}

fn tool_header() -> Value {
    json!({
        "name": "arborlab",
        "version": env!("CARGO_PKG_VERSION"),
        "schema": 1,
    })
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{}", e);
                    EXIT_OK
                }
                _ => {
                    eprint!("{}", e);
                    EXIT_USAGE
                }
            };
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cache_dir = std::env::var_os("ARBORLAB_CACHE")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| cli.cache_dir.clone());
    cache::set_cache_dir(cache_dir);
    match dispatch(&cli.command) {
        Ok(out) => {
            if cli.json {
                let mut v = out.payload;
                v["tool"] = tool_header();
                if out.command != "witness" {
                    v["command"] = json!(out.command);
                }
                println!("{}", v);
            } else {
                println!("{}", out.human);
            }
            EXIT_OK
        }
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {}", m);
            EXIT_USAGE
        }
        Err(CliError::Precondition(m)) => {
            eprintln!("rejected: {}", m);
            EXIT_PRECONDITION
        }
        Err(CliError::Resource(m)) => {
            eprintln!("resource limit: {}", m);
            EXIT_RESOURCE
        }
    }
}

fn get_map(s: &str) -> Result<RationalMap, CliError> {
    parse_map(s).map_err(|e| CliError::Usage(format!("--map: {}", e)))
}

fn get_point(s: &str) -> Result<ProjPointQ, CliError> {
    ProjPointQ::parse(s)
        .ok_or_else(|| CliError::Usage(format!("--point: cannot parse {:?} (want a/b or inf)", s)))
}

fn get_prime(p: u64) -> Result<Place, CliError> {
    if is_prime(p) {
        Ok(Place::new(p))
    } else {
        Err(CliError::Usage(format!("--prime: {} is not prime", p)))
    }
}

fn orbit_resource(e: OrbitError) -> CliError {
    CliError::Resource(e.to_string())
}

fn padic_error(e: PadicError) -> CliError {
    match e {
        PadicError::Precondition { .. } => CliError::Precondition(e.to_string()),
        _ => CliError::Resource(e.to_string()),
    }
}

fn tower_error(e: TowerError) -> CliError {
    match e {
        TowerError::ExceptionalBase => CliError::Precondition(e.to_string()),
        _ => CliError::Resource(e.to_string()),
    }
}

fn witness_error(e: WitnessError) -> CliError {
    match e {
        WitnessError::NotPcf
        | WitnessError::ExceptionalBase
        | WitnessError::PreperiodicBase
        | WitnessError::ConditionsFail { .. } => CliError::Precondition(e.to_string()),
        WitnessError::Local(inner) => padic_error(inner),
        WitnessError::NoWitnessFound { pmax, ref reasons } => {
            let shown: Vec<String> = reasons
                .iter()
                .take(8)
                .map(|(p, names)| format!("p={}: {}", p, names.join(", ")))
                .collect();
            CliError::Resource(format!(
                "no prime up to {} satisfies all conditions ({}{})",
                pmax,
                shown.join("; "),
                if reasons.len() > 8 { "; ..." } else { "" }
            ))
        }
        other => CliError::Resource(other.to_string()),
    }
}

fn verdict_strings(v: &GaloisVerdict) -> (&'static str, Option<String>, Vec<String>) {
    match v {
        GaloisVerdict::Abelian { root_maps } => (
            "abelian",
            None,
            root_maps.iter().map(|m| m.to_string()).collect(),
        ),
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
            ("nonabelian", Some(w), Vec::new())
        }
    }
}

fn tower_levels_json(levels: &[TowerLevel]) -> Value {
    Value::Array(
        levels
            .iter()
            .map(|level| {
                json!({
                    "level": level.n,
                    "poly": level.poly.to_string(),
                    "infinity_multiplicity": level.infinity_multiplicity,
                    "abelian": level.level_abelian,
                    "factors": level
                        .factorization
                        .factors
                        .iter()
                        .zip(&level.verdicts)
                        .map(|((g, _), v)| {
                            let (verdict, witness, _) = verdict_strings(v);
                            json!({
                                "poly": g.to_string(),
                                "verdict": verdict,
                                "witness": witness,
                            })
                        })
                        .collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn tower_levels_human(levels: &[TowerLevel]) -> String {
    let mut lines = Vec::new();
    for level in levels {
        lines.push(format!(
            "level {}: F = {}{}",
            level.n,
            level.poly,
            if level.infinity_multiplicity > 0 {
                format!("  (infinity multiplicity {})", level.infinity_multiplicity)
            } else {
                String::new()
            }
        ));
        for ((g, _), v) in level.factorization.factors.iter().zip(&level.verdicts) {
            let (verdict, witness, root_maps) = verdict_strings(v);
            let detail = match (witness, root_maps.is_empty()) {
                (Some(w), _) => format!(" ({})", w),
                (None, false) => format!(" (root maps: {})", root_maps.join(", ")),
                _ => String::new(),
            };
            lines.push(format!("  {}: {}{}", g, verdict, detail));
        }
        lines.push(format!(
            "  level verdict: {}",
            if level.level_abelian { "abelian" } else { "nonabelian" }
        ));
    }
    lines.join("\n")
}

fn dispatch(cmd: &Cmd) -> Result<Output, CliError> {
    match cmd {
        Cmd::Pcf(a) => {
            let f = get_map(&a.map)?;
            let cert = pcf_certify(&f).map_err(orbit_resource)?;
            let mut lines = Vec::new();
            if cert.is_pcf {
                lines.push(format!(
                    "PCF: yes (postcritical set stabilizes after {} push-forward steps)",
                    cert.postcritical.len()
                ));
                lines.push(format!(
                    "periodic critical periods: [{}], max period m = {}",
                    cert.periodic_critical_periods
                        .iter()
                        .map(|n| n.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    cert.m
                ));
            } else {
                lines.push("PCF: no (a critical orbit escapes the height threshold)".into());
                for (i, step) in cert.postcritical.iter().enumerate() {
                    let polys: Vec<String> = step
                        .factors()
                        .iter()
                        .map(|(h, _)| h.to_string())
                        .collect();
                    lines.push(format!(
                        "step {}: {}{}",
                        i + 1,
                        polys.join(", "),
                        if step.includes_infinity() { ", inf" } else { "" }
                    ));
                }
            }
            Ok(Output {
                human: lines.join("\n"),
                payload: json!({
                    "map": f.canonical_string(),
                    "pcf": cert.is_pcf,
                    "m": cert.m,
                    "periodic_critical_periods": cert.periodic_critical_periods,
                    "postcritical_steps": cert.postcritical.len(),
                }),
                command: "pcf",
            })
        }
        Cmd::Orbit(a) => {
            let f = get_map(&a.map)?;
            let alpha = get_point(&a.point)?;
            let (human, payload) = match classify_orbit(&f, &alpha) {
                OrbitClass::Preperiodic { tail, period } => (
                    format!("preperiodic: tail = {}, period = {}", tail, period),
                    json!({"class": "preperiodic", "tail": tail, "period": period}),
                ),
                OrbitClass::Wandering {
                    escape_index,
                    escape_height,
                } => (
                    format!(
                        "wandering: height clears the threshold at iterate {} (h = {:.6})",
                        escape_index, escape_height
                    ),
                    json!({
                        "class": "wandering",
                        "escape_index": escape_index,
                        "escape_height": escape_height,
                    }),
                ),
            };
            Ok(Output {
                human,
                payload,
                command: "orbit",
            })
        }
        Cmd::Places { mp, pmax } => {
            let f = get_map(&mp.map)?;
            let alpha = get_point(&mp.point)?;
            let places = find_periodic_places(&f, &alpha, *pmax);
            let human = if places.is_empty() {
                format!("no primes of periodic reduction up to {}", pmax)
            } else {
                places
                    .iter()
                    .map(|(v, c)| format!("p = {}  period = {}", v.p, c.period))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            Ok(Output {
                human,
                payload: json!({
                    "pmax": pmax,
                    "places": places
                        .iter()
                        .map(|(v, c)| json!({
                            "p": v.p,
                            "period": c.period,
                            "multiplier": c.multiplier.to_string(),
                        }))
                        .collect::<Vec<_>>(),
                }),
                command: "places",
            })
        }
        Cmd::Conditions { mp, prime } => {
            let f = get_map(&mp.map)?;
            let alpha = get_point(&mp.point)?;
            let v = get_prime(*prime)?;
            let cert = pcf_certify(&f).map_err(orbit_resource)?;
            let r = check_conditions(&f, &alpha, v, &cert);
            let mut lines = vec![
                format!("(A) residue characteristic > max period: {}", pass(r.a_char)),
                format!(
                    "(B) good reduction (resultant valuation {}): {}",
                    r.resultant_valuation,
                    pass(r.b_good_reduction)
                ),
                format!("(C) point integral at p: {}", pass(r.c_integral)),
                format!("(D) reduced point periodic: {}", pass(r.d_periodic)),
                format!("(E) cycle avoids critical residues: {}", pass(r.e_avoids_critical)),
                format!("unit multiplier: {}", pass(r.unit_multiplier)),
            ];
            if let Some(c) = &r.cycle {
                lines.push(format!(
                    "cycle: tail = {}, period = {}, multiplier = {}",
                    c.tail, c.period, c.multiplier
                ));
            }
            lines.push(if r.all_pass() {
                "all conditions pass".into()
            } else {
                format!("failed: {}", r.failed().join(", "))
            });
            Ok(Output {
                human: lines.join("\n"),
                payload: json!({
                    "p": r.p,
                    "conditions": {
                        "A": r.a_char,
                        "B": r.b_good_reduction,
                        "C": r.c_integral,
                        "D": r.d_periodic,
                        "E": r.e_avoids_critical,
                        "unit_multiplier": r.unit_multiplier,
                    },
                    "all_pass": r.all_pass(),
                    "failed": r.failed(),
                    "cycle": r.cycle.as_ref().map(|c| json!({
                        "tail": c.tail,
                        "period": c.period,
                        "multiplier": c.multiplier.to_string(),
                    })),
                    "conjugated_at_infinity": r.conjugated_at_infinity,
                }),
                command: "conditions",
            })
        }
        Cmd::Lift {
            mp,
            prime,
            levels,
            precision,
        } => {
            let f = get_map(&mp.map)?;
            let alpha = get_point(&mp.point)?;
            let v = get_prime(*prime)?;
            let lifts = backward_orbit_local(&f, &alpha, v, *levels, *precision)
                .map_err(padic_error)?;
            let human = lifts
                .iter()
                .enumerate()
                .map(|(i, x)| format!("level {}: {}", i, x))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                human,
                payload: json!({
                    "p": v.p,
                    "lifts": lifts
                        .iter()
                        .map(|x| json!({
                            "precision": x.precision(),
                            "residue": x.residue().to_string(),
                        }))
                        .collect::<Vec<_>>(),
                }),
                command: "lift",
            })
        }
        Cmd::Tower { mp, levels } => {
            let f = get_map(&mp.map)?;
            let alpha = get_point(&mp.point)?;
            let tower = analyze_tower(&f, &alpha, *levels).map_err(tower_error)?;
            Ok(Output {
                human: tower_levels_human(&tower),
                payload: json!({
                    "map": f.canonical_string(),
                    "point": alpha.display_string(),
                    "tower": tower_levels_json(&tower),
                }),
                command: "tower",
            })
        }
        Cmd::Galois(a) => {
            let f = get_map(&a.map)?;
            if !f.is_polynomial() {
                return Err(CliError::Precondition(
                    "galois expects a polynomial".into(),
                ));
            }
            let g = f.p().primitive_normalized();
            let fac = factor_over_q(&g).map_err(|e| CliError::Resource(e.to_string()))?;
            if fac.factors.len() != 1 || fac.factors[0].1 != 1 {
                let parts: Vec<String> =
                    fac.factors.iter().map(|(h, e)| format!("({})^{}", h, e)).collect();
                return Err(CliError::Precondition(format!(
                    "polynomial is reducible: {}",
                    parts.join(" ")
                )));
            }
            let verdict =
                is_abelian_galois(&fac.factors[0].0).map_err(|e| CliError::Resource(e.to_string()))?;
            let (name, witness, root_maps) = verdict_strings(&verdict);
            let human = match (&witness, root_maps.is_empty()) {
                (Some(w), _) => format!("{}: {}", name, w),
                (None, false) => format!("{} (root maps: {})", name, root_maps.join(", ")),
                _ => name.to_string(),
            };
            Ok(Output {
                human,
                payload: json!({
                    "poly": fac.factors[0].0.to_string(),
                    "verdict": name,
                    "witness": witness,
                    "root_maps": root_maps,
                }),
                command: "galois",
            })
        }
        Cmd::Family(a) => {
            let f = get_map(&a.map)?;
            let (human, payload) = match detect_family(&f) {
                FamilyTag::Powering { beta, c } => (
                    format!("powering: beta = {}, c = {}", rat_string(&beta), rat_string(&c)),
                    json!({
                        "family": "powering",
                        "beta": rat_string(&beta),
                        "c": rat_string(&c),
                    }),
                ),
                FamilyTag::ChebyshevPlus => {
                    ("chebyshev (+T_d)".to_string(), json!({"family": "chebyshev+"}))
                }
                FamilyTag::ChebyshevMinus => {
                    ("chebyshev (-T_d)".to_string(), json!({"family": "chebyshev-"}))
                }
                FamilyTag::None => ("none".to_string(), json!({"family": "none"})),
            };
            Ok(Output {
                human,
                payload,
                command: "family",
            })
        }
        Cmd::Conj { map, with } => {
            let f = get_map(map)?;
            let g = parse_map(with).map_err(|e| CliError::Usage(format!("--with: {}", e)))?;
            if !f.is_polynomial() || !g.is_polynomial() {
                return Err(CliError::Precondition(
                    "conj expects two polynomials".into(),
                ));
            }
            if f.degree() != g.degree() {
                return Err(CliError::Precondition(format!(
                    "degree mismatch: {} vs {}",
                    f.degree(),
                    g.degree()
                )));
            }
            let entries = affine_conjugators(&f, &g);
            let human = if entries.is_empty() {
                "no affine conjugation exists over any number field".to_string()
            } else {
                entries
                    .iter()
                    .map(|e| {
                        format!(
                            "a: root {} of {};  b: root {} of {};  field: Q[t]/({})",
                            e.a_root_index, e.a_minpoly, e.b_root_index, e.b_minpoly, e.field
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            Ok(Output {
                human,
                payload: json!({
                    "conjugators": entries
                        .iter()
                        .map(|e| json!({
                            "field": e.field.to_string(),
                            "a_minpoly": e.a_minpoly.to_string(),
                            "a_root_index": e.a_root_index,
                            "b_minpoly": e.b_minpoly.to_string(),
                            "b_root_index": e.b_root_index,
                        }))
                        .collect::<Vec<_>>(),
                }),
                command: "conj",
            })
        }
        Cmd::Sintegral { points } => {
            let mut pts = Vec::new();
            for s in points {
                pts.push(get_point(s)?);
            }
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if pts[i] == pts[j] {
                        return Err(CliError::Precondition(format!(
                            "points must be pairwise distinct ({} repeats)",
                            pts[i].display_string()
                        )));
                    }
                }
            }
            let s = minimal_s(&pts);
            Ok(Output {
                human: format!("minimal S = {}", s),
                payload: json!({
                    "points": pts.iter().map(|p| p.display_string()).collect::<Vec<_>>(),
                    "archimedean": true,
                    "primes": s.primes().collect::<Vec<_>>(),
                }),
                command: "sintegral",
            })
        }
        Cmd::Witness { mp, pmax, levels } => {
            let f = get_map(&mp.map)?;
            let alpha = get_point(&mp.point)?;
            let cert = witness_pipeline(&f, &alpha, *pmax, *levels).map_err(witness_error)?;
            let mut lines = vec![
                format!("witness prime: p = {}", cert.prime.p),
                "conditions (A)-(E) and unit multiplier: all pass".to_string(),
            ];
            if let Some(c) = &cert.report.cycle {
                lines.push(format!(
                    "cycle: tail = {}, period = {}, multiplier = {}",
                    c.tail, c.period, c.multiplier
                ));
            }
            for (i, x) in cert.local_evidence.iter().enumerate() {
                lines.push(format!("lift level {}: {}", i, x));
            }
            if !cert.tower_levels.is_empty() {
                lines.push(tower_levels_human(&cert.tower_levels));
            }
            match &cert.tower_evidence {
                Some(ev) => {
                    let (_, witness, _) = verdict_strings(&GaloisVerdict::NonAbelian {
                        witness: ev.witness.clone(),
                    });
                    lines.push(format!(
                        "tower evidence: nonabelian at level {} via {} ({})",
                        ev.level,
                        ev.factor,
                        witness.unwrap_or_default()
                    ));
                }
                None => lines.push(
                    "tower evidence: none at the analyzed depth (all levels abelian)".to_string(),
                ),
            }
            Ok(Output {
                human: lines.join("\n"),
                payload: cert.to_json(),
                command: "witness",
            })
        }
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}
