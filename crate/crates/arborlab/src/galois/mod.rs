//! Exact factorization over Q and over number fields, with a persistent
//! cache for the rational factorizations.

pub mod cache;
pub mod modp;
pub mod numfield;
pub mod overq;

pub use modp::{factor_mod_p, roots_mod_p};
pub use numfield::{
    factor_over_nf, is_abelian_galois, unequal_degree_witness, GaloisVerdict, NonAbelianWitness,
    NumberField,
};
pub use overq::{factor_over_q, factor_qpoly, FactorError, FactorizationQ};
