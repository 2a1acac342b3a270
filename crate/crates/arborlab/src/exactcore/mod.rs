//! Exact base layer: rationals, integer/rational polynomials, projective
//! points over Q, normalized rational maps, and the expression parser.

pub mod algset;
pub mod map;
pub mod parse;
pub mod point;
pub mod poly;
pub mod rat;

pub use algset::{crit_poly, AlgebraicPointSet};
pub use map::{MapError, RationalMap};
pub use parse::{parse_map, parse_poly};
pub use point::ProjPointQ;
pub use poly::{lagrange_interpolate, IntPoly, QPoly};
pub use rat::{parse_rat, rat, rat_int, rat_string, Rat};
