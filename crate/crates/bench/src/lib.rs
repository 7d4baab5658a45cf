//! Shared fixtures for the criterion benches: place systems and digit sets
//! built once per benchmark group.

use betarep_core::parse::{parse_alphabet, parse_minpoly};
use betarep_core::{FieldElement, PlaceSystem, PrecCtx};

pub fn system(minpoly: &str) -> PlaceSystem {
    let field = betarep_core::NumberField::new(parse_minpoly(minpoly).unwrap(), PrecCtx::default())
        .unwrap();
    PlaceSystem::new(field, PrecCtx::default()).unwrap()
}

pub fn digits(ps: &PlaceSystem, range: &str) -> Vec<FieldElement> {
    parse_alphabet(ps.field(), range).unwrap()
}
