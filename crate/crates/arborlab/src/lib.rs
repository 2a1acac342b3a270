//! Exact arithmetic for the dynamics of rational maps on P^1 over Q:
//! orbit classification, PCF certification, reduction modulo primes,
//! p-adic local dynamics, Galois analysis of iterated preimage towers,
//! and S-integrality of orbit segments.

pub mod cli;
pub mod exactcore;
pub mod fp;
pub mod galois;
pub mod integrality;
pub mod orbits;
pub mod padic;
pub mod residue;
pub mod tower;
pub mod util;

pub use exactcore::{
    crit_poly, parse_map, parse_poly, AlgebraicPointSet, IntPoly, MapError, ProjPointQ, QPoly,
    Rat, RationalMap,
};
pub use orbits::{
    canonical_height, classify_orbit, is_exceptional, pcf_certify, weil_height, HeightBound,
    OrbitClass, OrbitError, PcfCertificate,
};
pub use integrality::{is_s_integral_set, minimal_s, s_integral_extensions, NonIntegralWitness, PlaceSet};
pub use padic::{
    backward_orbit_local, classify_fixed_disc, hensel_lift_preimage, proj_metric, DiscClass,
    PadicError, PadicInt,
};
pub use residue::{
    check_conditions, find_periodic_places, orbit_mod_p, reduce_map, ConditionReport, CycleData,
    Place, ReduceError, ReducedMap,
};
pub use tower::{
    affine_conjugators, analyze_tower, chebyshev, detect_family, level_polynomial,
    verify_certificate, verify_certificate_json, witness_pipeline, AffineMapAlg, FamilyTag,
    TowerError, TowerLevel, TowerWitness, WitnessCertificate, WitnessError,
};
