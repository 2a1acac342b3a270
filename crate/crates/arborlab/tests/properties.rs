//! Randomized invariants: algebraic laws of maps and metrics, reduction
//! compatibilities, factorization reconstruction, and S-minimality.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use arborlab::galois::{factor_over_q, is_abelian_galois, GaloisVerdict, NumberField};
use arborlab::residue::orbit_mod_p;
use arborlab::{
    find_periodic_places, is_s_integral_set, minimal_s, parse_map, parse_poly, proj_metric,
    reduce_map, IntPoly, Place, ProjPointQ, QPoly, Rat, RationalMap,
};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=12).prop_map(|(a, b)| Rat::new(BigInt::from(a), BigInt::from(b)))
}

fn finite_point() -> impl Strategy<Value = ProjPointQ> {
    small_rat().prop_map(|q| ProjPointQ::from_rat(&q))
}

fn any_point() -> impl Strategy<Value = ProjPointQ> {
    prop_oneof![9 => finite_point(), 1 => Just(ProjPointQ::infinity())]
}

/// Coefficients (constant first) with exactly the requested degree.
fn poly_coeffs(deg: usize) -> impl Strategy<Value = Vec<i64>> {
    (
        proptest::collection::vec(-9i64..=9, deg),
        1i64..=9,
        proptest::bool::ANY,
    )
        .prop_map(|(mut low, lc, neg)| {
            low.push(if neg { -lc } else { lc });
            low
        })
}

fn rational_map() -> impl Strategy<Value = RationalMap> {
    (2usize..=3)
        .prop_flat_map(|d| {
            (
                poly_coeffs(d),
                prop_oneof![2 => Just(vec![1i64]), 1 => poly_coeffs(1)],
            )
        })
        .prop_filter_map("degree survives normalization", |(pc, qc)| {
            RationalMap::new(&IntPoly::from_i64(&pc), &IntPoly::from_i64(&qc)).ok()
        })
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop_oneof![
        Just(2u64),
        Just(3),
        Just(5),
        Just(7),
        Just(11),
        Just(13)
    ]
}

proptest! {
    #[test]
    fn iterates_compose(f in rational_map(), n in 1u32..=2, m in 1u32..=2) {
        let lhs = f.iterate(n + m);
        let rhs = f.iterate(n).compose(&f.iterate(m));
        prop_assert_eq!(lhs.canonical_string(), rhs.canonical_string());
        prop_assert_eq!(lhs.degree(), f.degree().pow(n + m));
    }

    #[test]
    fn wronskian_degree_bound(f in rational_map()) {
        let w = f.wronskian();
        prop_assert!(!w.is_zero());
        prop_assert!(w.deg() <= 2 * f.degree() - 2);
    }

    #[test]
    fn canonical_string_round_trips(f in rational_map()) {
        let s = f.canonical_string();
        let back = parse_map(&s).unwrap();
        prop_assert_eq!(back.canonical_string(), s);
    }

    #[test]
    fn metric_is_an_ultrametric(
        x in any_point(),
        y in any_point(),
        z in any_point(),
        p in small_prime(),
    ) {
        let v = Place::new(p);
        let dxy = proj_metric(&x, &y, v);
        let dyx = proj_metric(&y, &x, v);
        prop_assert_eq!(&dxy, &dyx);
        prop_assert!(dxy <= Rat::one());
        prop_assert!(proj_metric(&x, &x, v).is_zero());
        let dxz = proj_metric(&x, &z, v);
        let dyz = proj_metric(&y, &z, v);
        prop_assert!(dxz <= dxy.max(dyz));
    }

    #[test]
    fn reduction_commutes_with_evaluation(
        f in rational_map(),
        x in any_point(),
        p in small_prime(),
    ) {
        let v = Place::new(p);
        let fbar = match reduce_map(&f, v) { Ok(r) => r, Err(_) => return Ok(()) };
        let image = f.eval(&x);
        prop_assert_eq!(fbar.step(x.reduce_mod(p)), image.reduce_mod(p));
    }

    #[test]
    fn good_reduction_never_expands(
        f in rational_map(),
        x in any_point(),
        y in any_point(),
        p in small_prime(),
    ) {
        let v = Place::new(p);
        if reduce_map(&f, v).is_err() {
            return Ok(());
        }
        let before = proj_metric(&x, &y, v);
        let after = proj_metric(&f.eval(&x), &f.eval(&y), v);
        prop_assert!(after <= before);
    }

    #[test]
    fn iterates_inherit_good_reduction(
        f in rational_map(),
        p in small_prime(),
        n in 1u32..=3,
    ) {
        let v = Place::new(p);
        let fbar = match reduce_map(&f, v) { Ok(r) => r, Err(_) => return Ok(()) };
        let fnbar = reduce_map(&f.iterate(n), v);
        prop_assert!(fnbar.is_ok(), "iterate lost good reduction at {}", p);
        let fnbar = fnbar.unwrap();
        for i in 0..=p {
            let mut cur = i;
            for _ in 0..n {
                cur = fbar.step(cur);
            }
            prop_assert_eq!(fnbar.step(i), cur);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodic_places_grow_with_the_bound(
        pc in poly_coeffs(2),
        a in -5i64..=5,
    ) {
        let f = match RationalMap::from_poly(&IntPoly::from_i64(&pc)) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        let alpha = ProjPointQ::from_rat(&Rat::from_integer(BigInt::from(a)));
        let small = find_periodic_places(&f, &alpha, 60);
        let large = find_periodic_places(&f, &alpha, 200);
        let large_ps: Vec<u64> = large.iter().map(|(v, _)| v.p).collect();
        for (v, c) in &small {
            prop_assert!(large_ps.contains(&v.p));
            prop_assert_eq!(c.tail, 0);
            // the reported cycle matches a fresh modular orbit computation
            let fbar = reduce_map(&f, *v).unwrap();
            let fresh = orbit_mod_p(&fbar, alpha.reduce_mod(v.p));
            prop_assert_eq!(fresh.tail, 0);
            prop_assert_eq!(fresh.period, c.period);
            prop_assert_eq!(fresh.multiplier, c.multiplier);
        }
    }

    #[test]
    fn factoring_a_product_reconstructs_it(
        parts in proptest::collection::vec(
            prop_oneof![poly_coeffs(1), poly_coeffs(2)],
            1..=3,
        ),
        scale in prop_oneof![Just(1i64), Just(-2), Just(6)],
    ) {
        let mut g = IntPoly::from_i64(&[scale]);
        for c in &parts {
            g = g.mul(&IntPoly::from_i64(c));
        }
        let fac = factor_over_q(&g).unwrap();
        prop_assert_eq!(fac.product(), QPoly::from_int(&g));
        let mut total = 0usize;
        for (h, e) in &fac.factors {
            prop_assert!(h.deg() >= 1);
            prop_assert!(h.lc() > BigInt::zero());
            prop_assert!(h.content().is_one());
            // irreducibles are fixed points of the factorizer
            let again = factor_over_q(h).unwrap();
            prop_assert!(again.is_irreducible());
            prop_assert_eq!(&again.factors[0].0, h);
            total += h.deg() * (*e as usize);
        }
        prop_assert_eq!(total, g.deg());
    }

    #[test]
    fn minimal_s_is_minimal(
        pts in proptest::collection::vec(any_point(), 2..=4),
    ) {
        let mut xs: Vec<ProjPointQ> = Vec::new();
        for p in pts {
            if !xs.contains(&p) {
                xs.push(p);
            }
        }
        prop_assume!(xs.len() >= 2);
        let s = minimal_s(&xs);
        prop_assert!(is_s_integral_set(&xs, &s).is_ok());
        for p in s.primes().collect::<Vec<_>>() {
            prop_assert!(
                is_s_integral_set(&xs, &s.without(p)).is_err(),
                "S stays integral without {}", p
            );
        }
    }
}

/// The root maps of an abelian polynomial are closed under composition in
/// Q[t]/(g), contain the identity, and each one actually sends roots to roots.
fn assert_root_maps_form_a_group(g: &IntPoly) {
    let verdict = is_abelian_galois(g).unwrap();
    let root_maps = match verdict {
        GaloisVerdict::Abelian { root_maps } => root_maps,
        GaloisVerdict::NonAbelian { witness } => {
            panic!("{g} judged nonabelian: {witness:?}")
        }
    };
    assert_eq!(root_maps.len(), g.deg());
    let nf = NumberField::new(g);
    let identity = QPoly::from_coeffs(vec![Rat::zero(), Rat::one()]);
    assert!(root_maps.contains(&identity), "identity map missing");
    let gq = QPoly::from_int(g);
    for rm in &root_maps {
        assert!(
            nf.compose_mod(&gq, rm).is_zero(),
            "map {rm:?} does not send the generator to a root"
        );
        for other in &root_maps {
            let comp = nf.compose_mod(rm, other);
            assert!(
                root_maps.contains(&comp),
                "composition escapes the root-map set"
            );
        }
    }
}

#[test]
fn root_maps_close_for_the_eighth_cyclotomic() {
    assert_root_maps_form_a_group(&parse_poly("x^4+1").unwrap());
}

#[test]
fn root_maps_close_for_the_cos20_field() {
    assert_root_maps_form_a_group(&parse_poly("x^3-3x-1").unwrap());
}
