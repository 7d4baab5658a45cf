//! The attractor of the digit system: the compact set of tails
//! sum a_i beta^-i over all digit strings. Cylinder covers box it from
//! outside, interior certificates for the origin prove the spectrum is
//! relatively dense, and a randomized cross-check plays the certificate
//! machinery against the representation engine.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::ball::{Ball, PrecCtx};
use crate::engine::{represent, DomainSpec, Policy};
use crate::error::{CoreError, Result};
use crate::field::{FieldElement, Rational};
use crate::places::{Place, PlaceSystem};
use crate::spectrum::{enumerate_spectrum, SpectrumLevel, DEFAULT_MAX_POINTS};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Effort caps for the certificate search.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// deepest unrolling level tried
    pub max_level: u32,
    /// radii 1, 1/2, ..., 2^-(rho_steps-1)
    pub rho_steps: u32,
    pub max_points: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_level: 12, rho_steps: 9, max_points: DEFAULT_MAX_POINTS }
    }
}

/// Level-n cylinder cover: every attractor point lies within the stated
/// per-place radius of one of the points sum_{i=1..n} a_i beta^-i.
#[derive(Clone, Debug)]
pub struct CylinderCover {
    pub n: u32,
    pub points: Vec<FieldElement>,
    /// certified tail radius at every place of the representation space
    pub radii: Vec<(Place, Rational)>,
}

/// All partial tails of length n, deduplicated.
pub fn cylinder_cover(ps: &PlaceSystem, digits: &[FieldElement], n: u32) -> Result<CylinderCover> {
    if digits.is_empty() {
        return Err(CoreError::Invalid("empty digit set".into()));
    }
    if !ps.unit_arch().is_empty() {
        return Err(CoreError::UnitCirclePlacePresent);
    }
    for d in digits {
        d.same_field(&ps.field().zero())?;
    }
    let binv = ps.field().beta().inverse()?;
    let mut set: HashSet<FieldElement> = HashSet::new();
    set.insert(ps.field().zero());
    for _ in 0..n {
        if set.len().saturating_mul(digits.len()) > DEFAULT_MAX_POINTS {
            return Err(CoreError::MemoryBudgetExceeded("cylinder cover too large".into()));
        }
        let mut next = HashSet::with_capacity(set.len() * digits.len());
        for x in &set {
            for a in digits {
                next.insert(x.add(a).mul(&binv));
            }
        }
        set = next;
    }
    let mut points: Vec<FieldElement> = set.into_iter().collect();
    points.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));

    // tail radius per place: max |a|_p * |beta|_p^-n / (|beta|_p - 1),
    // everything rounded outward
    let mut radii = Vec::new();
    let mut places: Vec<Place> = ps.sbeta_arch().into_iter().map(|(p, _)| p).collect();
    places.extend(ps.finite_places());
    for place in places {
        let mut bits = 96u32;
        let radius = loop {
            let (beta_lb, _) = ps.beta_abs_bounds(&place, bits)?;
            if beta_lb > Rational::one() {
                let mut maxa = Rational::zero();
                for a in digits {
                    let ub = match &place {
                        Place::Finite { prime, .. } => {
                            let q = a.to_rational().ok_or_else(|| {
                                CoreError::Invalid("finite place on an irrational digit".into())
                            })?;
                            PlaceSystem::finite_abs(&q, prime)
                        }
                        _ => ps.embed_at(a, &place, bits)?.abs_ub(bits),
                    };
                    if ub > maxa {
                        maxa = ub;
                    }
                }
                let inv = beta_lb.recip();
                let mut decay = Rational::one();
                for _ in 0..n {
                    decay *= &inv;
                }
                break maxa * decay / (beta_lb - Rational::one());
            }
            bits *= 2;
            if bits > 1 << 14 {
                return Err(CoreError::PrecisionExhausted {
                    bits,
                    context: "place refused to certify expansion".into(),
                });
            }
        };
        radii.push((place, radius));
    }
    Ok(CylinderCover { n, points, radii })
}

/// A verified inclusion beta^n B_rho inside X + B_rho, which pins an open
/// ball around the origin inside the attractor.
#[derive(Clone, Debug)]
pub struct InteriorCertificate {
    /// unrolling depth: the witness points carry n digit coefficients
    pub n: u32,
    pub rho: Rational,
    /// certified coverage margin left over after the grid shift
    pub slack: Rational,
    pub witness: Vec<FieldElement>,
    /// grid pitch the inclusion was checked at; zero for the exact sweep
    pub pitch: Rational,
    pub bits: u32,
}

impl Serialize for InteriorCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("InteriorCertificate", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("rho", &self.rho.to_string())?;
        st.serialize_field("slack", &self.slack.to_string())?;
        let w: Vec<Vec<String>> = self.witness.iter().map(|x| x.coeff_strings()).collect();
        st.serialize_field("witness_points", &w)?;
        st.serialize_field("pitch", &self.pitch.to_string())?;
        st.serialize_field("bits", &self.bits)?;
        st.end()
    }
}

#[derive(Clone, Debug)]
pub enum InteriorOutcome {
    Certified(InteriorCertificate),
    NotFound {
        /// closest attempt: (level, rho, measured covering radius bound)
        best: Option<(u32, Rational, Rational)>,
        /// all digits sit on one side of zero at a positive expanding real
        /// place, so no ball around the origin fits
        one_sided: bool,
    },
}

/// Digits single-signed at a positive real expanding place force the
/// attractor into a half-line there: returns the place and true when the
/// attractor is confined to the nonnegative side.
fn one_sided_direction(
    ps: &PlaceSystem,
    digits: &[FieldElement],
) -> Result<Option<(Place, bool)>> {
    let bits = 96u32;
    for (place, _) in &ps.sbeta_arch() {
        if !matches!(place, Place::Real(_)) {
            continue;
        }
        let beta = ps.embed_at(&ps.field().beta(), place, bits)?;
        if &beta.re - &beta.rad <= Rational::one() {
            continue; // not certifiably positive and expanding
        }
        let mut all_nonneg = true;
        let mut all_nonpos = true;
        for a in digits {
            let b = ps.embed_at(a, place, bits)?;
            if &b.re - &b.rad < Rational::zero() {
                all_nonneg = false;
            }
            if &b.re + &b.rad > Rational::zero() {
                all_nonpos = false;
            }
        }
        if all_nonneg {
            return Ok(Some((place.clone(), true)));
        }
        if all_nonpos {
            return Ok(Some((place.clone(), false)));
        }
    }
    Ok(None)
}

enum Inclusion {
    Holds { slack: Rational, witness: Vec<FieldElement>, pitch: Rational, bits: u32 },
    Fails { achieved: Rational },
    Unknown,
}

/// Smallest integer r with p^r >= x, for rational x > 0.
fn min_pow_geq(p: &BigInt, x: &Rational) -> i64 {
    let p_q = Rational::from_integer(p.clone());
    let mut r = 0i64;
    let mut pw = Rational::one();
    if pw >= *x {
        // walk down while p^(r-1) still clears x
        loop {
            let lower = &pw / &p_q;
            if lower >= *x {
                pw = lower;
                r -= 1;
            } else {
                return r;
            }
        }
    }
    loop {
        pw *= &p_q;
        r += 1;
        if pw >= *x {
            return r;
        }
    }
}

fn v_p(n: &BigInt, p: &BigInt) -> u32 {
    let mut v = 0u32;
    let mut n = n.abs();
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// Residue of a rational with nonnegative p-valuation modulo p^k.
fn residue_mod_pk(q: &Rational, p: &BigInt, k: u32) -> Option<BigInt> {
    let mut num = q.numer().clone();
    let mut den = q.denom().clone();
    let vd = v_p(&den, p);
    if v_p(&num, p) < vd {
        return None; // negative valuation
    }
    for _ in 0..vd {
        num /= p;
        den /= p;
    }
    let mut modulus = BigInt::one();
    for _ in 0..k {
        modulus *= p;
    }
    if modulus.is_one() {
        return Some(BigInt::zero());
    }
    let e = den.extended_gcd(&modulus);
    if !e.gcd.is_one() {
        return None; // cannot happen after stripping, defensive
    }
    let inv = e.x.mod_floor(&modulus);
    Some((num * inv).mod_floor(&modulus))
}

/// Exact interval sweep: covering radius of [-r, r] by the sorted values.
fn interval_covering_radius(vals: &[Rational], r: &Rational) -> Option<Rational> {
    if vals.is_empty() {
        return None;
    }
    let nearest = |y: &Rational| -> Rational {
        let mut lo = 0usize;
        let mut hi = vals.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if &vals[mid] < y {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let mut best: Option<Rational> = None;
        if lo < vals.len() {
            best = Some((&vals[lo] - y).abs());
        }
        if lo > 0 {
            let d = (y - &vals[lo - 1]).abs();
            if best.as_ref().map_or(true, |b| &d < b) {
                best = Some(d);
            }
        }
        best.expect("nonempty")
    };
    let mut worst = nearest(&-r.clone()).max(nearest(r));
    for pair in vals.windows(2) {
        let mid = (&pair[0] + &pair[1]) / rat(2, 1);
        if mid > -r.clone() && mid < *r {
            let d = nearest(&mid);
            if d > worst {
                worst = d;
            }
        }
    }
    Some(worst)
}

/// Decide beta^n B_rho inside points + B_rho for a degree-one base,
/// exactly; finite places split the points into p-adic classes that must
/// each cover the real interval.
fn inclusion_rational(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    n: u32,
    rho: &Rational,
) -> Result<Inclusion> {
    let beta = ps.field().beta_rational().expect("degree one");
    let mut scale = Rational::one();
    for _ in 0..n {
        scale *= beta.abs();
    }
    let r_real = &scale * rho;

    let finite = ps.finite_places();
    if finite.is_empty() {
        let mut vals: Vec<Rational> = (0..level.len())
            .map(|i| level.element(i).to_rational().expect("degree one"))
            .collect();
        vals.sort();
        let rc = interval_covering_radius(&vals, &r_real).expect("level nonempty");
        if rc <= *rho {
            let witness: Vec<FieldElement> = (0..level.len())
                .filter(|&i| {
                    let v = level.element(i).to_rational().unwrap();
                    v.abs() <= &r_real + rho
                })
                .map(|i| level.element(i))
                .collect();
            return Ok(Inclusion::Holds {
                slack: rho - rc,
                witness,
                pitch: Rational::zero(),
                bits: 0,
            });
        }
        return Ok(Inclusion::Fails { achieved: rc });
    }

    // p-adic class data per finite place
    struct ClassPlace {
        prime: BigInt,
        /// class key width: residues mod p^width
        width: u32,
        /// valuation shift so x * p^shift is a p-adic integer on classes
        shift: i64,
    }
    let mut cps = Vec::new();
    let mut class_total = BigInt::one();
    for place in &finite {
        let Place::Finite { prime, .. } = place else { continue };
        let (_, beta_abs) = ps.beta_abs_bounds(place, 64)?; // exact for finite
        // |beta|_p = p^tau
        let tau = min_pow_geq(prime, &beta_abs);
        let r_eff = min_pow_geq(prime, &rho.recip()); // p^-r_eff <= rho
        let width_i = n as i64 * tau; // sub-ball count exponent
        if width_i < 0 {
            return Ok(Inclusion::Unknown);
        }
        let width = width_i as u32;
        for _ in 0..width {
            class_total *= prime;
        }
        // x * p^shift maps the target onto the p-adic integers, where the
        // cover condition becomes congruence mod p^width
        cps.push(ClassPlace { prime: prime.clone(), width, shift: width_i - r_eff });
    }
    if class_total > BigInt::from(20_000) {
        return Ok(Inclusion::Unknown);
    }

    // bucket points by class residue vector
    let mut buckets: HashMap<Vec<BigInt>, Vec<Rational>> = HashMap::new();
    let mut witness_pool: HashMap<Vec<BigInt>, Vec<usize>> = HashMap::new();
    for i in 0..level.len() {
        let x = level.element(i).to_rational().expect("degree one");
        let mut key = Vec::with_capacity(cps.len());
        let mut ok = true;
        for cp in &cps {
            // x * p^shift must be a p-adic integer to lie in any class
            let mut shifted = x.clone();
            let p_q = Rational::from_integer(cp.prime.clone());
            if cp.shift >= 0 {
                for _ in 0..cp.shift {
                    shifted *= &p_q;
                }
            } else {
                for _ in 0..(-cp.shift) {
                    shifted /= &p_q;
                }
            }
            match residue_mod_pk(&shifted, &cp.prime, cp.width) {
                Some(r) => key.push(r),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        buckets.entry(key.clone()).or_default().push(x);
        witness_pool.entry(key).or_default().push(i);
    }

    // walk every class combination
    let mut widths = Vec::new();
    for cp in &cps {
        let mut m = BigInt::one();
        for _ in 0..cp.width {
            m *= &cp.prime;
        }
        widths.push(m);
    }
    let mut counter: Vec<BigInt> = widths.iter().map(|_| BigInt::zero()).collect();
    let mut slack: Option<Rational> = None;
    let mut worst = Rational::zero();
    let mut witness_idx: HashSet<usize> = HashSet::new();
    loop {
        match buckets.get_mut(&counter) {
            Some(vals) => {
                vals.sort();
                let rc = interval_covering_radius(vals, &r_real).expect("nonempty bucket");
                if rc > worst {
                    worst = rc.clone();
                }
                if rc > *rho {
                    return Ok(Inclusion::Fails { achieved: worst });
                }
                let margin = rho - rc;
                if slack.as_ref().map_or(true, |s| &margin < s) {
                    slack = Some(margin);
                }
                for &i in witness_pool.get(&counter).expect("same keys") {
                    witness_idx.insert(i);
                }
            }
            None => {
                // an entire sub-ball with no candidate point
                return Ok(Inclusion::Fails { achieved: &r_real + rho });
            }
        }
        // increment the mixed-radix counter
        let mut pos = 0usize;
        loop {
            if pos == counter.len() {
                let mut witness: Vec<usize> = witness_idx.into_iter().collect();
                witness.sort_unstable();
                let witness = witness.into_iter().map(|i| level.element(i)).collect();
                return Ok(Inclusion::Holds {
                    slack: slack.unwrap_or_else(Rational::zero),
                    witness,
                    pitch: Rational::zero(),
                    bits: 0,
                });
            }
            counter[pos] += BigInt::one();
            if counter[pos] < widths[pos] {
                break;
            }
            counter[pos] = BigInt::zero();
            pos += 1;
        }
    }
}

/// Grid decision of beta^n B_rho inside points + B_rho over the product of
/// archimedean places; pitch-shift accounting keeps it sound.
fn inclusion_grid(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    n: u32,
    rho: &Rational,
    pitch_hint: Option<&Rational>,
    bits: u32,
) -> Result<Inclusion> {
    let arch = ps.sbeta_arch();
    let coords = level.arch_coords_f64(ps)?;
    let kinds: Vec<bool> =
        arch.iter().map(|(p, _)| matches!(p, Place::ComplexPair(_))).collect();

    // per-place target radius upper bound
    let mut radii = Vec::new();
    for (place, _) in &arch {
        let (_, ub) = ps.beta_abs_bounds(place, bits)?;
        let mut r = rho.clone();
        for _ in 0..n {
            r *= &ub;
        }
        radii.push(r);
    }
    let r_max = radii.iter().cloned().fold(Rational::zero(), |a, b| a.max(b));

    // pitch: hinted, or the largest radius over 12 with the grid capped
    let mut pitch = match pitch_hint {
        Some(h) => h.clone(),
        None => &r_max / rat(12, 1),
    };
    loop {
        let mut total = 1usize;
        for (j, r) in radii.iter().enumerate() {
            let per_axis =
                ((r * rat(2, 1)) / &pitch).ceil().to_integer().to_usize().unwrap_or(usize::MAX);
            let axes = if kinds[j] { 2 } else { 1 };
            for _ in 0..axes {
                total = total.saturating_mul(per_axis + 1);
            }
        }
        if total <= 200_000 {
            break;
        }
        if pitch_hint.is_some() {
            return Ok(Inclusion::Unknown); // honour the requested pitch
        }
        pitch = pitch * rat(2, 1);
        if pitch > &r_max * rat(2, 1) {
            return Ok(Inclusion::Unknown);
        }
    }
    let shift = rat(3, 4) * &pitch;
    let reach = rho - &shift;
    if reach <= Rational::zero() {
        return Ok(Inclusion::Unknown);
    }

    // flattened axis sample lists
    let mut samples: Vec<Vec<Rational>> = Vec::new();
    let mut axis_place: Vec<usize> = Vec::new();
    for (j, r) in radii.iter().enumerate() {
        let cnt = ((r * rat(2, 1)) / &pitch).ceil().to_integer().to_usize().unwrap_or(0) + 1;
        let axes = if kinds[j] { 2 } else { 1 };
        for _ in 0..axes {
            let mut xs = Vec::with_capacity(cnt);
            for i in 0..cnt {
                let x = -r.clone() + &pitch * rat(i as i64, 1);
                xs.push(if x > *r { r.clone() } else { x });
            }
            samples.push(xs);
            axis_place.push(j);
        }
    }
    let dims = samples.len();

    let max_norm = |a: &[f64], b: &[f64]| -> f64 {
        let mut m = 0.0f64;
        let mut k = 0;
        for &complex in &kinds {
            if complex {
                m = m.max((a[k] - b[k]).hypot(a[k + 1] - b[k + 1]));
                k += 2;
            } else {
                m = m.max((a[k] - b[k]).abs());
                k += 1;
            }
        }
        m
    };

    let mut idx = vec![0usize; dims];
    let mut slack: Option<Rational> = None;
    let mut witness_idx: HashSet<usize> = HashSet::new();
    let mut achieved = Rational::zero();
    let mut failed = false;
    'outer: loop {
        let point: Vec<Rational> =
            idx.iter().zip(&samples).map(|(&i, xs)| xs[i].clone()).collect();
        // skip grid points certifiably outside the inflated target
        let mut outside = false;
        {
            let mut k = 0usize;
            for (j, &complex) in kinds.iter().enumerate() {
                let lim = &radii[j] + &shift;
                if complex {
                    let d2 = &point[k] * &point[k] + &point[k + 1] * &point[k + 1];
                    if d2 > &lim * &lim {
                        outside = true;
                    }
                    k += 2;
                } else {
                    if point[k].abs() > lim {
                        outside = true;
                    }
                    k += 1;
                }
            }
        }
        if !outside {
            let pf: Vec<f64> = point.iter().map(|q| q.to_f64().unwrap_or(0.0)).collect();
            // nearest candidates by floating distance
            let mut order: Vec<(f64, usize)> = coords
                .iter()
                .enumerate()
                .map(|(i, c)| (max_norm(&pf, c), i))
                .collect();
            order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            let mut covered = false;
            let mut best_ub: Option<Rational> = None;
            for &(_, i) in order.iter().take(8) {
                let ub = exact_dist_ub(ps, &level.element(i), &arch, &point, bits)?;
                if best_ub.as_ref().map_or(true, |b| &ub < b) {
                    best_ub = Some(ub.clone());
                }
                if ub <= reach {
                    covered = true;
                    witness_idx.insert(i);
                    let margin = &reach - &ub;
                    if slack.as_ref().map_or(true, |s| &margin < s) {
                        slack = Some(margin);
                    }
                    break;
                }
            }
            if let Some(ub) = best_ub {
                let attained = ub + &shift;
                if attained > achieved {
                    achieved = attained;
                }
            }
            if !covered {
                failed = true;
                // keep scanning so `achieved` reflects the whole region
            }
        }
        let mut pos = 0usize;
        loop {
            if pos == dims {
                break 'outer;
            }
            idx[pos] += 1;
            if idx[pos] < samples[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
    if failed {
        return Ok(Inclusion::Fails { achieved });
    }
    let mut witness: Vec<usize> = witness_idx.into_iter().collect();
    witness.sort_unstable();
    Ok(Inclusion::Holds {
        slack: slack.unwrap_or_else(Rational::zero),
        witness: witness.into_iter().map(|i| level.element(i)).collect(),
        pitch,
        bits,
    })
}

/// Exact max-place distance upper bound between a point and flattened
/// rational coordinates.
fn exact_dist_ub(
    ps: &PlaceSystem,
    x: &FieldElement,
    arch: &[(Place, crate::places::ModulusClass)],
    point: &[Rational],
    bits: u32,
) -> Result<Rational> {
    let mut k = 0usize;
    let mut m = Rational::zero();
    for (place, _) in arch {
        let b = ps.embed_at(x, place, bits)?;
        let (pre, pim) = match place {
            Place::ComplexPair(_) => {
                let v = (point[k].clone(), point[k + 1].clone());
                k += 2;
                v
            }
            _ => {
                let v = (point[k].clone(), Rational::zero());
                k += 1;
                v
            }
        };
        let u = b.sub(&Ball::exact(pre, pim)).abs_ub(bits);
        if u > m {
            m = u;
        }
    }
    Ok(m)
}

fn check_inclusion(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    n: u32,
    rho: &Rational,
    pitch_hint: Option<&Rational>,
    bits: u32,
) -> Result<Inclusion> {
    if level.is_empty() {
        return Ok(Inclusion::Fails { achieved: rho * rat(2, 1) });
    }
    if ps.field().degree() == 1 {
        inclusion_rational(ps, level, n, rho)
    } else {
        inclusion_grid(ps, level, n, rho, pitch_hint, bits)
    }
}

/// Search for a ball around the origin inside the attractor: try each
/// unrolling depth with shrinking radii and return the first certified
/// inclusion.
pub fn origin_interior_certificate(
    ps: &PlaceSystem,
    digits: &[FieldElement],
    budget: &SearchBudget,
    prec: PrecCtx,
) -> Result<InteriorOutcome> {
    if digits.is_empty() {
        return Err(CoreError::Invalid("empty digit set".into()));
    }
    if !ps.unit_arch().is_empty() {
        return Err(CoreError::UnitCirclePlacePresent);
    }
    if one_sided_direction(ps, digits)?.is_some() {
        return Ok(InteriorOutcome::NotFound { best: None, one_sided: true });
    }
    let bits = prec.start_bits.max(96);
    let mut best: Option<(u32, Rational, Rational)> = None;
    for n in 1..=budget.max_level {
        // points further out than any target can never cover it
        let prune = prune_radius(ps, n, bits)?;
        let level = match enumerate_spectrum(ps, digits, n - 1, Some(&prune), budget.max_points) {
            Ok(l) => l,
            Err(CoreError::MemoryBudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        };
        let mut rho = Rational::one();
        for _ in 0..budget.rho_steps {
            match check_inclusion(ps, &level, n, &rho, None, bits)? {
                Inclusion::Holds { slack, witness, pitch, bits } => {
                    return Ok(InteriorOutcome::Certified(InteriorCertificate {
                        n,
                        rho,
                        slack,
                        witness,
                        pitch,
                        bits,
                    }));
                }
                Inclusion::Fails { achieved } => {
                    let better = match &best {
                        None => true,
                        Some((_, r, a)) => &achieved / &rho < a / r,
                    };
                    if better {
                        best = Some((n, rho.clone(), achieved));
                    }
                }
                Inclusion::Unknown => {}
            }
            rho = rho / rat(2, 1);
        }
    }
    Ok(InteriorOutcome::NotFound { best, one_sided: false })
}

/// largest per-place target radius at level n for rho = 1, plus covering
/// headroom
fn prune_radius(ps: &PlaceSystem, n: u32, bits: u32) -> Result<Rational> {
    let mut places: Vec<Place> = ps.sbeta_arch().into_iter().map(|(p, _)| p).collect();
    places.extend(ps.finite_places());
    let mut r_max = Rational::one();
    for place in &places {
        let (_, ub) = ps.beta_abs_bounds(place, bits)?;
        let mut r = Rational::one();
        for _ in 0..n {
            r *= &ub;
        }
        if r > r_max {
            r_max = r;
        }
    }
    Ok(r_max + rat(2, 1))
}

/// Re-derive the certificate from scratch at twice the resolution: the
/// witness points must reappear in the recomputed level and the inclusion
/// must hold again.
pub fn check_certificate(
    ps: &PlaceSystem,
    digits: &[FieldElement],
    cert: &InteriorCertificate,
    prec: PrecCtx,
) -> Result<bool> {
    if cert.n == 0 || cert.witness.is_empty() || cert.rho <= Rational::zero() {
        return Ok(false);
    }
    if !ps.unit_arch().is_empty() {
        return Ok(false);
    }
    let level = enumerate_spectrum(ps, digits, cert.n - 1, None, DEFAULT_MAX_POINTS)?;
    for w in &cert.witness {
        if !level.contains(w) {
            return Ok(false);
        }
    }
    let bits = (cert.bits.max(prec.start_bits)).saturating_mul(2).max(96);
    let finer = if cert.pitch.is_zero() { None } else { Some(&cert.pitch / rat(2, 1)) };
    match check_inclusion(ps, &level, cert.n, &cert.rho, finer.as_ref(), bits)? {
        Inclusion::Holds { .. } => Ok(true),
        _ => Ok(false),
    }
}

/// How the random samples for the cross-check are drawn.
#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { count: 20, seed: 0x5eed }
    }
}

/// Outcome of playing the interior certificate against the representation
/// engine on random field and ring elements.
#[derive(Clone, Debug, Serialize)]
pub struct CrossValidationReport {
    /// certificate found (true), refuted by obstruction (false), open (null)
    pub cond_interior: Option<bool>,
    /// density verdict mapped the same way
    pub cond_density: Option<bool>,
    pub q_attempted: usize,
    pub q_verified: usize,
    pub z_attempted: usize,
    pub z_verified: usize,
    /// budget exhaustions and other soft events
    pub flags: Vec<String>,
    /// verified outcomes that provably disagree with each other
    pub contradictions: Vec<String>,
}

/// Random Q(beta) and Z[beta] elements are pushed through the engine and
/// the outcomes compared with the interior/density verdicts; a genuine
/// clash between proofs is a contradiction, a budget miss is only a flag.
pub fn cross_validate_main2(
    ps: &PlaceSystem,
    digits: &[FieldElement],
    samples: &SampleSpec,
    policy: &Policy,
) -> Result<CrossValidationReport> {
    if !ps.unit_arch().is_empty() {
        return Err(CoreError::UnitCirclePlacePresent);
    }
    let budget = SearchBudget::default();
    let outcome = origin_interior_certificate(ps, digits, &budget, policy.prec)?;
    let cond_interior = match &outcome {
        InteriorOutcome::Certified(_) => Some(true),
        InteriorOutcome::NotFound { one_sided: true, .. } => Some(false),
        InteriorOutcome::NotFound { .. } => None,
    };
    let direction = one_sided_direction(ps, digits)?;
    let cond_density = match crate::spectrum::density_test(ps, digits, &budget, policy.prec)? {
        crate::spectrum::DensityVerdict::CertifiedDense => Some(true),
        crate::spectrum::DensityVerdict::EvidenceSparse => Some(false),
        _ => None,
    };

    let mut flags = Vec::new();
    let mut contradictions = Vec::new();
    if cond_interior == Some(true) && cond_density == Some(false) {
        contradictions
            .push("interior certificate coexists with a sparseness obstruction".into());
    }
    if cond_interior == Some(false) && cond_density == Some(true) {
        contradictions
            .push("density certificate coexists with a one-sided obstruction".into());
    }

    let field = ps.field();
    let d = field.degree().max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed);
    let draw = |ring: bool, rng: &mut ChaCha8Rng| -> FieldElement {
        let coeffs: Vec<Rational> = (0..d)
            .map(|_| {
                if ring {
                    Rational::from_integer(BigInt::from(rng.gen_range(-4i64..=4)))
                } else {
                    Rational::new(
                        BigInt::from(rng.gen_range(-8i64..=8)),
                        BigInt::from(rng.gen_range(1i64..=12)),
                    )
                }
            })
            .collect();
        field.element(coeffs).expect("degree-many coefficients")
    };

    let mut q_verified = 0usize;
    let mut z_verified = 0usize;
    for ring in [false, true] {
        for k in 0..samples.count {
            let x = draw(ring, &mut rng);
            let dom = DomainSpec::for_value(ps, digits.to_vec(), Rational::zero(), &x)?;
            match represent(ps, &dom, &x, policy) {
                Ok(rep) => {
                    if !crate::engine::verify(&rep, &x)? {
                        contradictions.push(format!(
                            "expansion of sample {} {} failed exact verification",
                            if ring { "z" } else { "q" },
                            k
                        ));
                        continue;
                    }
                    if ring {
                        z_verified += 1;
                    } else {
                        q_verified += 1;
                    }
                    if let Some((place, nonneg)) = &direction {
                        if let Some(witness) =
                            one_sided_violation(ps, &x, rep.l_shift, place, *nonneg)?
                        {
                            contradictions.push(format!(
                                "sample {} {} has a verified expansion yet sits at {} on the \
                                 forbidden side",
                                if ring { "z" } else { "q" },
                                k,
                                witness
                            ));
                        }
                    }
                }
                Err(CoreError::IterationCapExceeded { cap }) => {
                    flags.push(format!(
                        "sample {} {}: iteration cap {} exhausted",
                        if ring { "z" } else { "q" },
                        k,
                        cap
                    ));
                }
                Err(CoreError::NoAdmissibleDigit { .. }) => {
                    flags.push(format!(
                        "sample {} {}: no admissible digit",
                        if ring { "z" } else { "q" },
                        k
                    ));
                }
                Err(CoreError::DenominatorCapExceeded { .. }) => {
                    flags.push(format!(
                        "sample {} {}: denominator cap exceeded",
                        if ring { "z" } else { "q" },
                        k
                    ));
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(CrossValidationReport {
        cond_interior,
        cond_density,
        q_attempted: samples.count,
        q_verified,
        z_attempted: samples.count,
        z_verified,
        flags,
        contradictions,
    })
}

/// With digits one-signed at a positive real place, every represented value
/// scaled into the attractor must land on that side; a certified landing on
/// the forbidden side is a genuine inconsistency.
fn one_sided_violation(
    ps: &PlaceSystem,
    x: &FieldElement,
    l_shift: i64,
    place: &Place,
    nonneg: bool,
) -> Result<Option<String>> {
    let bits = 128u32;
    let beta = ps.embed_at(&ps.field().beta(), place, bits)?;
    let beta_lb = &beta.re - &beta.rad;
    let beta_ub = &beta.re + &beta.rad;
    if beta_lb <= Rational::one() {
        return Ok(None);
    }
    // interval for beta^-L x at the place; L >= 0 divides, L < 0 multiplies
    let b = ps.embed_at(x, place, bits)?;
    let mut lo = &b.re - &b.rad;
    let mut hi = &b.re + &b.rad;
    let steps = l_shift.unsigned_abs();
    let mut pow_lb = Rational::one();
    let mut pow_ub = Rational::one();
    for _ in 0..steps {
        pow_lb *= &beta_lb;
        pow_ub *= &beta_ub;
    }
    if l_shift >= 0 {
        lo = if lo >= Rational::zero() { lo / &pow_ub } else { lo / &pow_lb };
        hi = if hi >= Rational::zero() { hi / &pow_lb } else { hi / &pow_ub };
    } else {
        lo = if lo >= Rational::zero() { lo * &pow_lb } else { lo * &pow_ub };
        hi = if hi >= Rational::zero() { hi * &pow_ub } else { hi * &pow_lb };
    }
    let violated = if nonneg { hi < Rational::zero() } else { lo > Rational::zero() };
    if violated {
        Ok(Some(format!("[{}, {}]", lo, hi)))
    } else {
        Ok(None)
    }
}
