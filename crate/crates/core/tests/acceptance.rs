//! Release gate: end-to-end checks of the engine, the classifier, the
//! certificate machinery and the approximation layer on pinned instances.
//! Each test prints one summary line; a cap hit in the Salem expansion run
//! is reported as a distinguished soft failure instead of a panic, since no
//! termination bound is known for Salem bases.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use betarep_core::attractor::{
    check_certificate, cross_validate_main2, origin_interior_certificate,
};
use betarep_core::classify::weak_greedy_decision;
use betarep_core::engine::{represent, verify, DomainSpec, Policy};
use betarep_core::parse::parse_minpoly;
use betarep_core::places::classify_base;
use betarep_core::spectrum::{enumerate_spectrum, min_gap, separation_bound, DEFAULT_MAX_POINTS};
use betarep_core::{
    approx, Ball, BaseLabel, CoreError, FieldElement, InteriorOutcome, NumberField, Place,
    PlaceSystem, PrecCtx, Rational, SampleSpec, SearchBudget,
};

fn field(minpoly: &str) -> NumberField {
    NumberField::new(parse_minpoly(minpoly).unwrap(), PrecCtx::default()).unwrap()
}

fn system(minpoly: &str) -> PlaceSystem {
    PlaceSystem::new(field(minpoly), PrecCtx::default()).unwrap()
}

fn digit_range(ps: &PlaceSystem, lo: i64, hi: i64) -> Vec<FieldElement> {
    (lo..=hi).map(|k| ps.field().from_int(k)).collect()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Salem base, digits {-2..2}: represent 1/n for n = 2..20 in empirical
/// mode and verify every result exactly, within a minute.
#[test]
fn salem_unit_fractions_represent_and_verify() {
    let ps = system("x^4-x^3-x^2-x+1");
    let digits = digit_range(&ps, -2, 2);
    let policy = Policy::default();
    let start = Instant::now();
    let mut capped = Vec::new();
    let mut verified = 0usize;
    for n in 2..=20i64 {
        let x = ps.field().from_rational(rat(1, n));
        let dom = DomainSpec::for_value(&ps, digits.clone(), rat(1, 16), &x).unwrap();
        match represent(&ps, &dom, &x, &policy) {
            Ok(rep) => {
                assert!(verify(&rep, &x).unwrap(), "1/{} verified unequal", n);
                verified += 1;
            }
            Err(CoreError::IterationCapExceeded { .. }) => capped.push(n),
            Err(e) => panic!("1/{}: {}", n, e),
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {:?}", elapsed);
    if capped.is_empty() {
        println!(
            "PASS salem unit fractions: 19/19 verified exactly in {:.2?}",
            elapsed
        );
    } else {
        // soft failure: termination is not guaranteed for Salem bases
        println!(
            "SOFT FAIL salem unit fractions: {} verified, cap hit for 1/n, n in {:?}",
            verified, capped
        );
    }
}

/// Golden ratio base, digits {0,1}: every reduced p/q in (0,1) with
/// q <= 30 has an exactly verified eventually periodic expansion.
#[test]
fn golden_small_denominators_all_verify() {
    let ps = system("x^2-x-1");
    let digits = digit_range(&ps, 0, 1);
    let policy = Policy::default();
    let start = Instant::now();
    let mut count = 0usize;
    for q in 2..=30i64 {
        for p in 1..q {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let x = ps.field().from_rational(rat(p, q));
            let dom = DomainSpec::for_value(&ps, digits.clone(), rat(1, 16), &x).unwrap();
            let rep = represent(&ps, &dom, &x, &policy)
                .unwrap_or_else(|e| panic!("{}/{}: {}", p, q, e));
            assert!(verify(&rep, &x).unwrap(), "{}/{} verified unequal", p, q);
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {:?}", elapsed);
    println!(
        "PASS golden denominators to 30: {} values verified exactly in {:.2?}",
        count, elapsed
    );
}

/// Six pinned classifications, all exact, plus the refusal flag for the
/// base with a second expanding conjugate.
#[test]
fn classifier_table_is_exact() {
    let table: [(&str, BaseLabel, bool); 6] = [
        ("x^2-x-1", BaseLabel::Pisot, true),
        ("x^3-x-1", BaseLabel::Pisot, true),
        ("x^4-x^3-x^2-x+1", BaseLabel::Salem, true),
        ("x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1", BaseLabel::Salem, true),
        ("x^2+2x+2", BaseLabel::ComplexPisot, true),
        ("x^2-5", BaseLabel::ExpandingOther, false),
    ];
    for (poly, expected, admits) in table {
        let f = field(poly);
        let label = classify_base(&f, PrecCtx::default()).unwrap();
        assert_eq!(label, expected, "{} misclassified", poly);
        let ps = PlaceSystem::new(f, PrecCtx::default()).unwrap();
        let verdict = weak_greedy_decision(&ps).unwrap();
        assert_eq!(verdict.admits, admits, "{} weak-greedy flag", poly);
    }
    println!("PASS classifier table: 6/6 labels and weak-greedy flags exact");
}

/// Origin-interior certificates: exact success for base 2 with symmetric
/// digits, success within the level budget for -1+i with {-2..2}, and a
/// one-sided refusal for base 2 with {0,1}. Every issued certificate
/// passes an independent recheck.
#[test]
fn origin_interior_certificates_and_refusal() {
    let budget = SearchBudget::default();
    let prec = PrecCtx::default();

    let ps = system("x-2");
    let digits = digit_range(&ps, -1, 1);
    match origin_interior_certificate(&ps, &digits, &budget, prec).unwrap() {
        InteriorOutcome::Certified(cert) => {
            assert_eq!(cert.n, 1);
            assert_eq!(cert.rho, Rational::one());
            assert_eq!(cert.witness.len(), 3);
            assert!(check_certificate(&ps, &digits, &cert, prec).unwrap());
        }
        InteriorOutcome::NotFound { .. } => panic!("symmetric binary certificate not found"),
    }

    let ps = system("x^2+2x+2");
    let digits = digit_range(&ps, -2, 2);
    match origin_interior_certificate(&ps, &digits, &budget, prec).unwrap() {
        InteriorOutcome::Certified(cert) => {
            assert!(cert.n >= 1 && cert.n <= budget.max_level);
            assert!(cert.rho > Rational::zero());
            assert!(check_certificate(&ps, &digits, &cert, prec).unwrap());
        }
        InteriorOutcome::NotFound { .. } => panic!("complex base certificate not found"),
    }

    let ps = system("x-2");
    let digits = digit_range(&ps, 0, 1);
    match origin_interior_certificate(&ps, &digits, &budget, prec).unwrap() {
        InteriorOutcome::Certified(_) => panic!("one-sided digits cannot pin the origin"),
        InteriorOutcome::NotFound { one_sided, .. } => assert!(one_sided),
    }

    println!("PASS origin certificates: two certified and rechecked, one-sided refusal flagged");
}

/// The certificate machinery and the engine agree on 20 seeded samples
/// per base: no contradictions on any of the three pinned systems.
#[test]
fn cross_validation_finds_no_contradictions() {
    // the one-sided system produces divergent orbits that only the step
    // cap can reject, so the shared policy keeps it small
    let policy = Policy { max_steps: 2_000, ..Policy::default() };
    let samples = SampleSpec::default();
    let cases: [(&str, i64, i64); 3] = [("x-2", -1, 1), ("x^2+2x+2", -2, 2), ("x-2", 0, 1)];
    let mut verified = 0usize;
    for (poly, lo, hi) in cases {
        let ps = system(poly);
        let digits = digit_range(&ps, lo, hi);
        let report = cross_validate_main2(&ps, &digits, &samples, &policy).unwrap();
        assert!(
            report.contradictions.is_empty(),
            "{} with {}..{}: {:?}",
            poly,
            lo,
            hi,
            report.contradictions
        );
        verified += report.q_verified + report.z_verified;
    }
    println!(
        "PASS cross-validation: 3 bases x 20 samples, {} orbits verified, 0 contradictions",
        verified
    );
}

/// Spectra stay uniformly discrete: at every level n <= 8 the measured
/// minimal gap dominates the a-priori separation bound, which is
/// strictly positive for all three bases.
#[test]
fn spectra_meet_the_separation_bound() {
    let cases: [(&str, i64, i64); 3] =
        [("x-2", 0, 1), ("x^2-x-1", 0, 1), ("x^4-x^3-x^2-x+1", -2, 2)];
    for (poly, lo, hi) in cases {
        let ps = system(poly);
        let digits = digit_range(&ps, lo, hi);
        let bound = separation_bound(&ps, &digits).unwrap();
        assert!(bound > Rational::zero(), "{}: bound not positive", poly);
        for n in 0..=8u32 {
            let level = enumerate_spectrum(&ps, &digits, n, None, DEFAULT_MAX_POINTS).unwrap();
            if level.len() < 2 {
                continue;
            }
            let (lb, _ub) = min_gap(&ps, &level, PrecCtx::default()).unwrap();
            assert!(
                lb >= bound,
                "{} level {}: certified gap {} below bound {}",
                poly,
                n,
                lb,
                bound
            );
        }
    }
    println!("PASS uniform discreteness: min gap >= separation bound at all levels <= 8");
}

fn random_element(f: &NumberField, rng: &mut ChaCha8Rng) -> FieldElement {
    let coeffs: Vec<Rational> = (0..f.degree())
        .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=9)))
        .collect();
    f.element(coeffs).unwrap()
}

fn assert_eq_el(a: &FieldElement, b: &FieldElement, what: &str) {
    assert!(a.sub(b).is_zero(), "{} differ", what);
}

/// Exact field arithmetic: ring axioms on random triples, inverse round
/// trips, and trace/norm against the certified embeddings.
#[test]
fn field_arithmetic_random_suite() {
    let f = field("x^4-x^3-x^2-x+1");
    let ps = system("x^4-x^3-x^2-x+1");
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce55);

    for _ in 0..1000 {
        let a = random_element(&f, &mut rng);
        let b = random_element(&f, &mut rng);
        let c = random_element(&f, &mut rng);
        assert_eq_el(&a.add(&b).add(&c), &a.add(&b.add(&c)), "additive associativity");
        assert_eq_el(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c)), "multiplicative associativity");
        assert_eq_el(&a.add(&b), &b.add(&a), "additive commutativity");
        assert_eq_el(&a.mul(&b), &b.mul(&a), "multiplicative commutativity");
        assert_eq_el(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c)), "distributivity");
    }

    let one = f.one();
    let mut inverted = 0usize;
    while inverted < 500 {
        let a = random_element(&f, &mut rng);
        if a.is_zero() {
            continue;
        }
        assert_eq_el(&a.inverse().unwrap().mul(&a), &one, "inverse round trip");
        inverted += 1;
    }

    let bits = 2 * PrecCtx::default().start_bits;
    for _ in 0..200 {
        let a = random_element(&f, &mut rng);
        let mut sum = Ball::zero();
        let mut prod = Ball::exact(Rational::one(), Rational::zero());
        for i in 0..f.degree() {
            let image = ps.embed(&a, i, bits).unwrap();
            sum = sum.add(&image);
            prod = prod.mul(&image, bits);
        }
        let trace = a.trace();
        assert!((trace - sum.re).abs() <= sum.rad, "trace outside certified ball");
        assert!(sum.im.abs() <= sum.rad, "trace ball not real");
        let norm = a.norm();
        assert!((norm - prod.re).abs() <= prod.rad, "norm outside certified ball");
        assert!(prod.im.abs() <= prod.rad, "norm ball not real");
    }

    println!("PASS field arithmetic: 1000 axiom triples, 500 inverses, 200 trace/norm checks");
}

/// Weak approximation: 50 seeded targets per field at eps = 1/32; every
/// returned element stays within eps of its targets when the embeddings
/// are recomputed at doubled precision.
#[test]
fn weak_approximation_hits_random_targets() {
    let eps = rat(1, 32);
    let cap = BigInt::from(1u64 << 40);
    let bits = 2 * PrecCtx::default().start_bits;
    for (poly, seed) in [("x^2-x-1", 0xa110u64), ("x^4-x^3-x^2-x+1", 0xa111u64)] {
        let ps = system(poly);
        let arch = ps.sbeta_arch();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for round in 0..50 {
            let targets: Vec<(Rational, Rational)> = arch
                .iter()
                .map(|(place, _)| {
                    let re = rat(rng.gen_range(-8..=8), rng.gen_range(1..=4));
                    let im = match place {
                        Place::ComplexPair(_) => rat(rng.gen_range(-8..=8), rng.gen_range(1..=4)),
                        _ => Rational::zero(),
                    };
                    (re, im)
                })
                .collect();
            let z = approx::weak_approximate(&ps, &targets, &eps, &cap, PrecCtx::default())
                .unwrap_or_else(|e| panic!("{} round {}: {}", poly, round, e));
            for (j, (place, _)) in arch.iter().enumerate() {
                let ball = ps.embed_at(&z, place, bits).unwrap();
                let target = Ball::exact(targets[j].0.clone(), targets[j].1.clone());
                let err = ball.sub(&target).abs_ub(bits);
                assert!(
                    err < eps,
                    "{} round {} place {}: certified error {} exceeds eps",
                    poly,
                    round,
                    j,
                    err
                );
            }
        }
    }
    println!("PASS weak approximation: 2 fields x 50 targets certified at doubled precision");
}
