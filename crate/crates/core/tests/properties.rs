//! Randomised invariants: serialization round trips, parser round trips,
//! and exact reconstruction of represented values.

use proptest::prelude::*;

use betarep_core::engine::{represent, verify, DomainSpec, Policy};
use betarep_core::parse::{parse_minpoly, parse_rational, representation_from_json};
use betarep_core::{IntPoly, NumberField, PlaceSystem, PrecCtx, Rational};

use num_bigint::BigInt;

fn binary_system() -> PlaceSystem {
    let field = NumberField::new(parse_minpoly("x-2").unwrap(), PrecCtx::default()).unwrap();
    PlaceSystem::new(field, PrecCtx::default()).unwrap()
}

fn golden_system() -> PlaceSystem {
    let field = NumberField::new(parse_minpoly("x^2-x-1").unwrap(), PrecCtx::default()).unwrap();
    PlaceSystem::new(field, PrecCtx::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = Rational::new(BigInt::from(n), BigInt::from(d));
        let parsed = parse_rational(&q.to_string()).unwrap();
        prop_assert_eq!(parsed, q);
    }

    #[test]
    fn integer_polynomials_survive_json(coeffs in prop::collection::vec(-50i64..50, 1..8)) {
        prop_assume!(coeffs.iter().any(|&c| c != 0));
        let poly = IntPoly::new(coeffs.into_iter().map(BigInt::from).collect());
        let text = serde_json::to_string(&poly).unwrap();
        let back: IntPoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, poly);
    }

    #[test]
    fn binary_representations_reconstruct_exactly(p in 1i64..200, q in 2i64..200) {
        prop_assume!(p < q);
        let ps = binary_system();
        let x = ps.field().from_rational(Rational::new(BigInt::from(p), BigInt::from(q)));
        let digits = vec![ps.field().from_int(0), ps.field().from_int(1)];
        let dom = DomainSpec::for_value(&ps, digits, parse_rational("1/16").unwrap(), &x).unwrap();
        let rep = represent(&ps, &dom, &x, &Policy::default()).unwrap();
        prop_assert!(verify(&rep, &x).unwrap());

        // the documented JSON schema reproduces the same exact value
        let json = serde_json::to_value(&rep).unwrap();
        let (field, back) = representation_from_json(&json, PrecCtx::default()).unwrap();
        let x_back = field.from_rational(Rational::new(BigInt::from(p), BigInt::from(q)));
        prop_assert!(verify(&back, &x_back).unwrap());
    }

    #[test]
    fn golden_representations_reconstruct_exactly(p in 1i64..40, q in 2i64..40) {
        prop_assume!(p < q);
        let ps = golden_system();
        let x = ps.field().from_rational(Rational::new(BigInt::from(p), BigInt::from(q)));
        let digits = vec![ps.field().from_int(0), ps.field().from_int(1)];
        let dom = DomainSpec::for_value(&ps, digits, parse_rational("1/16").unwrap(), &x).unwrap();
        let rep = represent(&ps, &dom, &x, &Policy::default()).unwrap();
        prop_assert!(verify(&rep, &x).unwrap());
    }
}
