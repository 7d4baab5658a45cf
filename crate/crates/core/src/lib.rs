//! Exact arithmetic in number fields, certified place embeddings, and the
//! digit machinery for eventually periodic expansions in an algebraic base.
//!
//! The crate is organised bottom-up: `ball` provides outward-rounded complex
//! ball arithmetic over dyadic rationals, `poly`/`roots` isolate and certify
//! the conjugates of the base, `field` implements the exact quotient-ring
//! arithmetic, `places` assembles the embedding data, and the remaining
//! modules build alphabets, orbits, spectra and attractor certificates on top.

pub mod approx;
pub mod attractor;
pub mod ball;
pub mod classify;
pub mod engine;
pub mod error;
pub mod field;
pub mod parse;
pub mod places;
pub mod poly;
pub mod roots;
pub mod spectrum;

pub use approx::{Alphabet, AlphabetMode, CoverCertificate, CoverVerdict};
pub use attractor::{
    CrossValidationReport, CylinderCover, InteriorCertificate, InteriorOutcome, SampleSpec,
    SearchBudget,
};
pub use ball::{Ball, PrecCtx};
pub use classify::WeakGreedyVerdict;
pub use engine::{DomainSpec, Mode, OrbitTrace, Policy, Representation};
pub use error::CoreError;
pub use field::{FieldElement, NumberField, Rational};
pub use places::{BaseLabel, ModulusClass, Place, PlaceSystem, RootBall};
pub use poly::IntPoly;
pub use spectrum::{DensityVerdict, Region, RegionBox, SpectrumLevel};
