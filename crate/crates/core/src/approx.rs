//! Alphabet design and certified digit-set covers.
//!
//! A digit set works for the guaranteed engine exactly when the image of the
//! domain under multiplication by beta stays inside the union of translated
//! domains, one translate per digit. The natural shape for such a set is a
//! cartesian product: a small cover per place, glued into field elements by
//! simultaneous rational approximation. This module constructs those
//! alphabets, realises cover points as elements of Q(beta), and validates
//! covers in exact arithmetic, so a certificate really means the step
//! function cannot leave the domain, for every radius m >= 1 at once.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::ball::{Ball, PrecCtx};
use crate::error::{CoreError, Result};
use crate::field::{FieldElement, Rational};
use crate::places::{BaseLabel, ModulusClass, Place, PlaceSystem, RootBall};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Default certified overlap for guaranteed alphabets.
pub fn default_margin() -> Rational {
    rat(1, 16)
}

/// Default realisation error for cover points; half the margin, so the
/// margin absorbs it with room to spare.
pub fn default_epsilon() -> Rational {
    rat(1, 32)
}

/// How to construct a digit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphabetMode {
    /// Product cover realised as field elements, tagged so `validate_cover`
    /// can certify it place by place.
    Guaranteed,
    /// Smallest symmetric integer range admissible for a complex expanding
    /// quadratic base: 2M+1 must exceed beta*conj(beta) + |beta+conj(beta)|.
    ComplexPisotBound,
    /// The symmetric integer range {-m..m}, taken on faith.
    IntegerRange(i64),
}

/// A digit set, optionally annotated with the product cover it realises.
///
/// `tags[k][j]` is the cover point approximated by digit `k` at the j-th
/// non-contracting archimedean place (canonical order), each within
/// `epsilon` of the digit's embedding there, certified. Plain digit sets
/// carry no tags and epsilon 0.
#[derive(Clone, Debug)]
pub struct Alphabet {
    pub digits: Vec<FieldElement>,
    pub epsilon: Rational,
    pub tags: Option<Vec<Vec<(Rational, Rational)>>>,
}

impl Alphabet {
    pub fn plain(digits: Vec<FieldElement>) -> Alphabet {
        Alphabet { digits, epsilon: Rational::zero(), tags: None }
    }

    /// Digits as the symmetric integer range {-m..m} in the given field.
    pub fn integer_range(field: &crate::field::NumberField, m: i64) -> Alphabet {
        Alphabet::plain((-m..=m).map(|i| field.from_int(i)).collect())
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Digit {
            coeffs: Vec<String>,
        }
        let digits: Vec<Digit> = self
            .digits
            .iter()
            .map(|d| Digit { coeffs: d.coeff_strings() })
            .collect();
        let tags: Option<Vec<Vec<[String; 2]>>> = self.tags.as_ref().map(|t| {
            t.iter()
                .map(|row| row.iter().map(|(re, im)| [re.to_string(), im.to_string()]).collect())
                .collect()
        });
        let mut st = s.serialize_struct("Alphabet", 3)?;
        st.serialize_field("digits", &digits)?;
        st.serialize_field("epsilon", &self.epsilon.to_string())?;
        st.serialize_field("tags", &tags)?;
        st.end()
    }
}

/// Outcome of a cover validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverVerdict {
    Certified,
    Indeterminate,
    Refuted,
}

/// Verdict of `validate_cover` plus enough data to replay the check. When
/// refuted, `witness` holds an uncovered point of the image of the domain,
/// one coordinate pair per non-contracting archimedean place.
#[derive(Clone, Debug)]
pub struct CoverCertificate {
    pub verdict: CoverVerdict,
    pub margin: Rational,
    pub pitch: Rational,
    pub notes: Vec<String>,
    pub witness: Option<Vec<(Rational, Rational)>>,
}

impl Serialize for CoverCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let witness: Option<Vec<[String; 2]>> = self
            .witness
            .as_ref()
            .map(|w| w.iter().map(|(re, im)| [re.to_string(), im.to_string()]).collect());
        let mut st = s.serialize_struct("CoverCertificate", 5)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("margin", &self.margin.to_string())?;
        st.serialize_field("pitch", &self.pitch.to_string())?;
        st.serialize_field("notes", &self.notes)?;
        st.serialize_field("witness", &witness)?;
        st.end()
    }
}

/// Best rational approximation to `x` with denominator at most `max_den`,
/// by continued-fraction convergents and the final semiconvergent.
fn best_approx(x: &Rational, max_den: &BigInt) -> Rational {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let mut p1 = x.floor().to_integer();
    let mut q1 = BigInt::one();
    let mut rem = x - Rational::from_integer(p1.clone());
    loop {
        if rem.is_zero() {
            return Rational::new(p1, q1);
        }
        let inv = rem.recip();
        let a = inv.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            let conv = Rational::new(p1.clone(), q1.clone());
            // largest semiconvergent still under the cap
            let k = (max_den - &q0) / &q1;
            if k.is_positive() {
                let semi = Rational::new(&k * &p1 + &p0, &k * &q1 + &q0);
                if (x - &semi).abs() < (x - &conv).abs() {
                    return semi;
                }
            }
            return conv;
        }
        rem = &inv - Rational::from_integer(a);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
}

fn common_rational_target(targets: &[(Rational, Rational)]) -> Option<Rational> {
    let first = &targets[0].0;
    for (re, im) in targets {
        if !im.is_zero() || re != first {
            return None;
        }
    }
    Some(first.clone())
}

fn conj_index(roots: &[RootBall], i: usize) -> Option<usize> {
    let c = roots[i].ball.conj();
    roots
        .iter()
        .position(|rb| !rb.is_real && rb.ball.re == c.re && rb.ball.im == c.im)
}

/// Solve a dense complex linear system by Gaussian elimination with partial
/// pivoting. The matrices here are tiny conjugate-Vandermonde systems.
fn solve_complex(mut m: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[piv][col].norm() < 1e-12 {
            return Err(CoreError::Invalid("embedding system numerically singular".into()));
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                let t = m[col][k];
                m[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

enum Certify {
    Within,
    Exceeds,
    Unknown,
}

/// Certified comparison of max-place error against eps, escalating precision.
fn certify_error(
    ps: &PlaceSystem,
    z: &FieldElement,
    targets: &[(Rational, Rational)],
    eps: &Rational,
    prec: PrecCtx,
) -> Result<Certify> {
    let arch = ps.sbeta_arch();
    for bits in prec.ladder() {
        let mut all_within = true;
        let mut undecided = false;
        for (j, (place, _)) in arch.iter().enumerate() {
            let ball = ps.embed_at(z, place, bits)?;
            let t = Ball::exact(targets[j].0.clone(), targets[j].1.clone());
            let diff = ball.sub(&t);
            if &diff.abs_ub(bits) < eps {
                continue;
            }
            if &diff.abs_lb(bits) >= eps {
                return Ok(Certify::Exceeds);
            }
            all_within = false;
            undecided = true;
            break;
        }
        if all_within {
            return Ok(Certify::Within);
        }
        if !undecided {
            return Ok(Certify::Exceeds);
        }
    }
    Ok(Certify::Unknown)
}

/// Find z in Q(beta) whose embeddings at the non-contracting archimedean
/// places all lie within `eps` of the given targets, certified.
///
/// The targets are extended by zero at the contracting places, the resulting
/// conjugate-Vandermonde system is solved in floating point for power-basis
/// coefficients, and the coefficients are rounded to rationals under a
/// denominator bound that grows geometrically up to `denom_cap`. Every
/// candidate is accepted only with a certified error bound.
pub fn weak_approximate(
    ps: &PlaceSystem,
    targets: &[(Rational, Rational)],
    eps: &Rational,
    denom_cap: &BigInt,
    prec: PrecCtx,
) -> Result<FieldElement> {
    let arch = ps.sbeta_arch();
    if targets.len() != arch.len() {
        return Err(CoreError::Invalid(format!(
            "expected {} targets (one per non-contracting archimedean place), got {}",
            arch.len(),
            targets.len()
        )));
    }
    if !eps.is_positive() {
        return Err(CoreError::Invalid("approximation error bound must be positive".into()));
    }
    if denom_cap < &BigInt::one() {
        return Err(CoreError::DenominatorCapExceeded { cap: denom_cap.clone() });
    }
    let field = ps.field();

    // A shared real rational target embeds with error zero at every place.
    if let Some(t) = common_rational_target(targets) {
        if t.denom() <= denom_cap {
            return Ok(field.from_rational(t));
        }
    }

    if field.degree() == 1 {
        // single archimedean place, identity embedding: exact arithmetic
        let (re, im) = &targets[0];
        let imsq = im * im;
        let epssq = eps * eps;
        let mut den = BigInt::from(16);
        loop {
            let den_b = if &den > denom_cap { denom_cap.clone() } else { den.clone() };
            let z = best_approx(re, &den_b);
            let diff = re - &z;
            if &diff * &diff + &imsq < epssq {
                return Ok(field.from_rational(z));
            }
            if den_b == *denom_cap {
                return Err(CoreError::DenominatorCapExceeded { cap: denom_cap.clone() });
            }
            den *= 64;
        }
    }

    let d = field.degree();
    let roots = ps.roots();
    let mut rhs = vec![Complex64::new(0.0, 0.0); d];
    for (j, (place, _)) in arch.iter().enumerate() {
        let w = Complex64::new(
            targets[j].0.to_f64().unwrap_or(0.0),
            targets[j].1.to_f64().unwrap_or(0.0),
        );
        match place {
            Place::Real(i) => rhs[*i] = w,
            Place::ComplexPair(i) => {
                rhs[*i] = w;
                if let Some(k) = conj_index(roots, *i) {
                    rhs[k] = w.conj();
                }
            }
            Place::Finite { .. } => unreachable!("archimedean list"),
        }
    }
    let mut mat = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (i, rb) in roots.iter().enumerate() {
        let (re, im) = rb.ball.to_f64();
        let r = Complex64::new(re, im);
        let mut p = Complex64::new(1.0, 0.0);
        for x in mat[i].iter_mut() {
            *x = p;
            p *= r;
        }
    }
    let coeffs_f = solve_complex(mat, rhs)?;

    let mut den = BigInt::from(16);
    loop {
        let den_b = if &den > denom_cap { denom_cap.clone() } else { den.clone() };
        let cand: Vec<Rational> = coeffs_f
            .iter()
            .map(|c| {
                let x = Rational::from_float(c.re).unwrap_or_else(Rational::zero);
                best_approx(&x, &den_b)
            })
            .collect();
        let z = field.element(cand)?;
        match certify_error(ps, &z, targets, eps, prec)? {
            Certify::Within => return Ok(z),
            Certify::Exceeds => {
                if den_b == *denom_cap {
                    return Err(CoreError::DenominatorCapExceeded { cap: denom_cap.clone() });
                }
            }
            Certify::Unknown => {
                return Err(CoreError::PrecisionExhausted {
                    bits: prec.max_bits,
                    context: "weak approximation error straddles the bound".into(),
                });
            }
        }
        den *= 64;
    }
}

fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Construct a digit set in the requested mode.
pub fn suggest_alphabet(ps: &PlaceSystem, mode: AlphabetMode, prec: PrecCtx) -> Result<Alphabet> {
    match mode {
        AlphabetMode::IntegerRange(m) => {
            if m < 0 {
                return Err(CoreError::Invalid("integer range bound must be nonnegative".into()));
            }
            Ok(Alphabet::integer_range(ps.field(), m))
        }
        AlphabetMode::ComplexPisotBound => complex_pisot_alphabet(ps, prec),
        AlphabetMode::Guaranteed => guaranteed_alphabet(ps, prec),
    }
}

/// The quadratic complex bound: smallest M with 2M+1 > |beta|^2 + |2 Re beta|.
fn complex_pisot_alphabet(ps: &PlaceSystem, prec: PrecCtx) -> Result<Alphabet> {
    match ps.label() {
        BaseLabel::ComplexPisot | BaseLabel::ComplexSalem => {}
        other => {
            return Err(CoreError::Invalid(format!(
                "complex integer-range bound needs a complex expanding base, found {}",
                other
            )))
        }
    }
    let field = ps.field();
    if field.degree() == 2 {
        // minpoly x^2 + a1 x + a0: beta conj(beta) = a0, beta + conj(beta) = -a1
        let coeffs = &field.minpoly().coeffs;
        let t = coeffs[0].clone() + coeffs[1].abs();
        // smallest M with 2M+1 > t for integer t is ceil(t/2)
        let m = (&t + BigInt::one()) / BigInt::from(2);
        let m = m.to_i64().ok_or_else(|| {
            CoreError::MemoryBudgetExceeded("integer alphabet bound overflows".into())
        })?;
        return Ok(Alphabet::integer_range(field, m));
    }
    // higher degree: pin the bound between certified ends of the interval
    let i = ps.distinguished();
    for bits in prec.ladder() {
        let b = ps.root_at(i, bits)?.ball;
        let s = b.add(&b.conj());
        let t_lb = {
            let lb = b.abs_lb(bits);
            &lb * &lb + s.abs_lb(bits)
        };
        let t_ub = {
            let ub = b.abs_ub(bits);
            &ub * &ub + s.abs_ub(bits)
        };
        let mut m = ceil_int(&(&t_ub / rat(2, 1)));
        while Rational::from_integer(BigInt::from(2) * &m + BigInt::one()) <= t_ub {
            m += BigInt::one();
        }
        // minimal: M-1 must already fail against the true value
        if Rational::from_integer(BigInt::from(2) * &m - BigInt::one()) <= t_lb {
            let m = m.to_i64().ok_or_else(|| {
                CoreError::MemoryBudgetExceeded("integer alphabet bound overflows".into())
            })?;
            return Ok(Alphabet::integer_range(field, m));
        }
    }
    Err(CoreError::PrecisionExhausted {
        bits: prec.max_bits,
        context: "complex alphabet bound sits on an odd integer".into(),
    })
}

/// Digits for a rational base s/t: the grid {i/t} wide enough to cover the
/// image interval and containing a full residue system for every prime
/// power dividing t. Exact values, so no tags are needed.
fn rational_guaranteed(ps: &PlaceSystem, delta: &Rational) -> Result<Alphabet> {
    let field = ps.field();
    let beta = field.beta_rational().expect("degree one");
    let r = beta.abs();
    let t = beta.denom().clone();
    let t_q = Rational::from_integer(t.clone());
    // top digit (kt + t - 1)/t must reach r - (1 - delta)
    let need = &r - rat(2, 1) + delta + t_q.recip();
    let k = ceil_int(&need).max(BigInt::zero());
    let hi = &k * &t + &t - BigInt::one();
    let mut digits = Vec::new();
    let mut i = -hi.clone();
    while i <= hi {
        digits.push(field.from_rational(Rational::new(i.clone(), t.clone())));
        i += BigInt::one();
    }
    Ok(Alphabet::plain(digits))
}

/// Per-place cover grids for the product construction.
fn place_cover_points(
    ps: &PlaceSystem,
    place: &Place,
    class: ModulusClass,
    delta: &Rational,
    eps: &Rational,
) -> Result<Vec<(Rational, Rational)>> {
    let zero = Rational::zero;
    match (class, place) {
        (ModulusClass::Expanding, Place::Real(_)) => {
            let (_, r_ub) = ps.beta_abs_bounds(place, 96)?;
            let k = ceil_int(&(&r_ub - Rational::one() + delta + eps)).max(BigInt::one());
            let mut pts = Vec::new();
            let mut i = -k.clone();
            while i <= k {
                pts.push((Rational::from_integer(i.clone()), zero()));
                i += BigInt::one();
            }
            Ok(pts)
        }
        (ModulusClass::Expanding, Place::ComplexPair(_)) => {
            let (_, r_ub) = ps.beta_abs_bounds(place, 96)?;
            let lim = &r_ub + delta + Rational::one();
            let limsq = &lim * &lim;
            let k = ceil_int(&lim);
            let mut pts = Vec::new();
            let mut u = -k.clone();
            while u <= k {
                let mut v = -k.clone();
                while v <= k {
                    let nsq = Rational::from_integer(&u * &u + &v * &v);
                    if nsq <= limsq {
                        pts.push((
                            Rational::from_integer(u.clone()),
                            Rational::from_integer(v.clone()),
                        ));
                    }
                    v += BigInt::one();
                }
                u += BigInt::one();
            }
            Ok(pts)
        }
        (ModulusClass::UnitCircle, _) => {
            // origin plus four axis points; validate_cover certifies that
            // this five-point set absorbs the realisation error for every
            // domain radius m >= 1
            let g = rat(1, 2);
            Ok(vec![
                (zero(), zero()),
                (g.clone(), zero()),
                (-g.clone(), zero()),
                (zero(), g.clone()),
                (zero(), -g),
            ])
        }
        _ => Err(CoreError::Invalid("contracting place in cover".into())),
    }
}

fn guaranteed_alphabet(ps: &PlaceSystem, prec: PrecCtx) -> Result<Alphabet> {
    if ps.classes()[ps.distinguished()] != ModulusClass::Expanding {
        return Err(CoreError::BaseNotExpanding);
    }
    let delta = default_margin();
    let eps = default_epsilon();
    if ps.field().degree() == 1 {
        return rational_guaranteed(ps, &delta);
    }
    let arch = ps.sbeta_arch();
    let mut grids = Vec::with_capacity(arch.len());
    for (place, class) in &arch {
        grids.push(place_cover_points(ps, place, *class, &delta, &eps)?);
    }
    let total: usize = grids.iter().map(Vec::len).product();
    if total > 4096 {
        return Err(CoreError::MemoryBudgetExceeded(format!(
            "product cover has {} points",
            total
        )));
    }
    let denom_cap = BigInt::from(10_000_000i64);
    let mut digits = Vec::with_capacity(total);
    let mut tags = Vec::with_capacity(total);
    let mut seen = HashSet::with_capacity(total);
    let mut idx = vec![0usize; grids.len()];
    loop {
        let combo: Vec<(Rational, Rational)> =
            idx.iter().zip(&grids).map(|(&i, g)| g[i].clone()).collect();
        let z = weak_approximate(ps, &combo, &eps, &denom_cap, prec)?;
        if seen.insert(z.clone()) {
            digits.push(z);
            tags.push(combo);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(Alphabet { digits, epsilon: eps, tags: Some(tags) });
            }
            idx[pos] += 1;
            if idx[pos] < grids[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// dist(y, ball center) - rad > r, exactly.
fn certainly_outside_ball(y: &(Rational, Rational), b: &Ball, r: &Rational) -> bool {
    let dx = &y.0 - &b.re;
    let dy = &y.1 - &b.im;
    let d2 = &dx * &dx + &dy * &dy;
    let thr = r + &b.rad;
    d2 > &thr * &thr
}

/// dist(y, ball center) + rad <= r, exactly.
fn certainly_within_ball(y: &(Rational, Rational), b: &Ball, r: &Rational) -> bool {
    if &b.rad > r {
        return false;
    }
    let dx = &y.0 - &b.re;
    let dy = &y.1 - &b.im;
    let d2 = &dx * &dx + &dy * &dy;
    let thr = r - &b.rad;
    d2 <= &thr * &thr
}

/// Exact residue completeness at the finite places: every class j/p^e must
/// sit within distance one of some digit in the p-adic metric.
fn finite_cover_gap(ps: &PlaceSystem, digits: &[Rational]) -> Option<(BigInt, BigInt, u32)> {
    for place in ps.finite_places() {
        let (p, e) = match place {
            Place::Finite { prime, exp } => (prime, exp),
            _ => unreachable!(),
        };
        let mut modulus = BigInt::one();
        for _ in 0..e {
            modulus *= &p;
        }
        let mut j = BigInt::zero();
        while j < modulus {
            let target = Rational::new(j.clone(), modulus.clone());
            let hit = digits.iter().any(|a| {
                PlaceSystem::finite_abs(&(a - &target), &p) <= Rational::one()
            });
            if !hit {
                return Some((p.clone(), j, e));
            }
            j += BigInt::one();
        }
    }
    None
}

struct SweepSpec {
    // digit value intervals [lo, hi] on the real line
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

/// Coverage of [-r, r] (up to its open end) by the certain windows
/// [hi_i - w, lo_i + w] of half-width w around the digit intervals.
/// Returns an uncovered point strictly inside (-r, r) on failure; since the
/// image interval is half-open only at one end, covering the closed hull is
/// exactly what soundness needs and a strictly interior gap always refutes.
fn real_sweep(spec: &SweepSpec, w: &Rational, r: &Rational) -> Option<Rational> {
    let mut windows: Vec<(Rational, Rational)> = spec
        .lo
        .iter()
        .zip(&spec.hi)
        .map(|(lo, hi)| (hi - w, lo + w))
        .filter(|(s, e)| s <= e)
        .collect();
    windows.sort();
    let mut reach = -r.clone();
    for (s, e) in windows {
        if &reach >= r {
            return None;
        }
        if s > reach {
            // gap between covered prefix and the next window
            let edge = if &s < r { s } else { r.clone() };
            return Some((&reach + &edge) / rat(2, 1));
        }
        if e > reach {
            reach = e;
        }
    }
    if &reach < r {
        return Some((&reach + r) / rat(2, 1));
    }
    None
}

/// Unit-circle cover admissibility for the five-point axis set with gauge g
/// and digit error eps, for every radius m >= 1 at once. Uses sqrt(2) >= 7/5.
fn unit_axes_admissible(g: &Rational, eps: &Rational) -> bool {
    if !g.is_positive() || g > &Rational::one() {
        return false;
    }
    let s = rat(7, 5) * g;
    // (A) the per-m coefficient: sqrt(2) g >= 2 eps
    if s < rat(2, 1) * eps {
        return false;
    }
    // (B) the m = 1 value: sqrt(2) g - 2 eps - g^2 + eps^2 >= 0
    &s - rat(2, 1) * eps - g * g + eps * eps >= Rational::zero()
}

enum PlaceCheck {
    Ok(String),
    Fail(String),
}

/// Per-place validation of a tagged (product-form) alphabet.
fn check_tagged_place(
    ps: &PlaceSystem,
    place: &Place,
    class: ModulusClass,
    pts: &[(Rational, Rational)],
    delta: &Rational,
    eps: &Rational,
    pitch: &Rational,
) -> Result<PlaceCheck> {
    match class {
        ModulusClass::Expanding => match place {
            Place::Real(_) => {
                let (_, r_ub) = ps.beta_abs_bounds(place, 128)?;
                if pts.iter().any(|(_, im)| !im.is_zero()) {
                    return Ok(PlaceCheck::Fail("complex tag at a real place".into()));
                }
                let w = Rational::one() - delta;
                if !w.is_positive() {
                    return Ok(PlaceCheck::Fail("margin leaves no window".into()));
                }
                let xs: Vec<Rational> = pts.iter().map(|(re, _)| re.clone()).collect();
                let spec = SweepSpec { lo: xs.clone(), hi: xs };
                match real_sweep(&spec, &w, &r_ub) {
                    None => Ok(PlaceCheck::Ok(format!("real cover of radius {}", r_ub))),
                    Some(y) => Ok(PlaceCheck::Fail(format!("uncovered near {}", y))),
                }
            }
            Place::ComplexPair(_) => {
                let (_, r_ub) = ps.beta_abs_bounds(place, 128)?;
                let w = Rational::one() - delta;
                let slack = rat(3, 4) * pitch;
                if w <= slack {
                    return Ok(PlaceCheck::Fail("pitch too coarse for the margin".into()));
                }
                let reach = &w - &slack;
                let reach_sq = &reach * &reach;
                let rsq = &r_ub * &r_ub;
                let k = ceil_int(&(&r_ub / pitch));
                let mut u = -k.clone();
                while u <= k {
                    let yu = Rational::from_integer(u.clone()) * pitch;
                    let mut v = -k.clone();
                    while v <= k {
                        let yv = Rational::from_integer(v.clone()) * pitch;
                        let nsq = &yu * &yu + &yv * &yv;
                        if nsq <= rsq {
                            let hit = pts.iter().any(|(a, b)| {
                                let dx = &yu - a;
                                let dy = &yv - b;
                                &dx * &dx + &dy * &dy <= reach_sq
                            });
                            if !hit {
                                return Ok(PlaceCheck::Fail(format!(
                                    "uncovered near ({}, {})",
                                    yu, yv
                                )));
                            }
                        }
                        v += BigInt::one();
                    }
                    u += BigInt::one();
                }
                Ok(PlaceCheck::Ok(format!("complex cover of radius {} at pitch {}", r_ub, pitch)))
            }
            Place::Finite { .. } => unreachable!("archimedean list"),
        },
        ModulusClass::UnitCircle => {
            let zero = (Rational::zero(), Rational::zero());
            if !pts.contains(&zero) {
                return Ok(PlaceCheck::Fail("unit-circle cover misses the origin".into()));
            }
            // one tag per digit: distinct cover points only
            let mut others: Vec<&(Rational, Rational)> =
                pts.iter().filter(|p| **p != zero).collect();
            others.sort();
            others.dedup();
            if others.is_empty() {
                // bare origin: sound only for exact digits
                return if eps.is_zero() {
                    Ok(PlaceCheck::Ok("origin-only unit cover, exact digits".into()))
                } else {
                    Ok(PlaceCheck::Fail(
                        "origin-only unit cover cannot absorb digit error".into(),
                    ))
                };
            }
            let g = others
                .iter()
                .map(|(re, im)| if re.is_zero() { im.abs() } else { re.abs() })
                .max()
                .unwrap();
            let expected = [
                (g.clone(), Rational::zero()),
                (-g.clone(), Rational::zero()),
                (Rational::zero(), g.clone()),
                (Rational::zero(), -g.clone()),
            ];
            let axes_ok = others.len() == 4
                && expected.iter().all(|e| others.iter().any(|p| **p == *e));
            if !axes_ok {
                return Ok(PlaceCheck::Fail("unit-circle cover is not the axis set".into()));
            }
            if unit_axes_admissible(&g, eps) {
                Ok(PlaceCheck::Ok(format!("axis cover with gauge {}", g)))
            } else {
                Ok(PlaceCheck::Fail("axis gauge too small for the digit error".into()))
            }
        }
        ModulusClass::Contracting => unreachable!("non-contracting list"),
    }
}

/// Certified |digit - tag| <= eps at every tagged place.
fn check_tag_fidelity(
    ps: &PlaceSystem,
    alphabet: &Alphabet,
    prec: PrecCtx,
) -> Result<Option<String>> {
    let tags = alphabet.tags.as_ref().unwrap();
    let arch = ps.sbeta_arch();
    if tags.len() != alphabet.digits.len() {
        return Err(CoreError::Invalid("one tag row per digit required".into()));
    }
    for (k, row) in tags.iter().enumerate() {
        if row.len() != arch.len() {
            return Err(CoreError::Invalid(
                "one tag per non-contracting archimedean place required".into(),
            ));
        }
        for (j, (place, _)) in arch.iter().enumerate() {
            let target = Ball::exact(row[j].0.clone(), row[j].1.clone());
            let mut decided = false;
            for bits in prec.ladder() {
                let ball = ps.embed_at(&alphabet.digits[k], place, bits)?;
                let diff = ball.sub(&target);
                if diff.abs_ub(bits) <= alphabet.epsilon {
                    decided = true;
                    break;
                }
                if diff.abs_lb(bits) > alphabet.epsilon {
                    return Err(CoreError::Invalid(format!(
                        "digit {} sits further than epsilon from its tag",
                        k
                    )));
                }
            }
            if !decided {
                return Ok(Some(format!("tag error for digit {} undecided at cap", k)));
            }
        }
    }
    Ok(None)
}

struct UntaggedOutcome {
    verdict: CoverVerdict,
    notes: Vec<String>,
    witness: Option<Vec<(Rational, Rational)>>,
}

/// Joint semi-decision over the product of places for an arbitrary digit
/// set: accept when every grid point of the image region is certifiably
/// within 1 - delta - slack of some digit, refute on a grid point that is
/// certifiably outside distance 1 of every digit yet inside the image.
fn check_untagged(
    ps: &PlaceSystem,
    alphabet: &Alphabet,
    delta: &Rational,
    pitch: &Rational,
    bits: u32,
) -> Result<UntaggedOutcome> {
    let arch = ps.sbeta_arch();
    let fail = |notes: Vec<String>| UntaggedOutcome {
        verdict: CoverVerdict::Indeterminate,
        notes,
        witness: None,
    };

    // single real place: the exact interval sweep decides outright
    if arch.len() == 1 && matches!(arch[0].0, Place::Real(_)) {
        return untagged_single_real(ps, alphabet, delta, &arch[0].0, bits);
    }

    // embeddings of every digit at every place
    let mut balls: Vec<Vec<Ball>> = Vec::with_capacity(alphabet.digits.len());
    for digit in &alphabet.digits {
        let mut row = Vec::with_capacity(arch.len());
        for (place, _) in &arch {
            row.push(ps.embed_at(digit, place, bits)?);
        }
        balls.push(row);
    }

    // axes of the joint grid, flattened: real places one axis, complex two
    struct Axis {
        place: usize,
        imag: bool,
        half_range: Rational,
    }
    let mut axes = Vec::new();
    let mut radius_ub = Vec::with_capacity(arch.len());
    let mut radius_lb = Vec::with_capacity(arch.len());
    for (j, (place, class)) in arch.iter().enumerate() {
        let (r_lb, r_ub) = match class {
            ModulusClass::Expanding => ps.beta_abs_bounds(place, 128)?,
            // beta has modulus exactly one here, image radius is m = 1
            ModulusClass::UnitCircle => (Rational::one(), Rational::one()),
            ModulusClass::Contracting => unreachable!(),
        };
        axes.push(Axis { place: j, imag: false, half_range: r_ub.clone() });
        if matches!(place, Place::ComplexPair(_)) {
            axes.push(Axis { place: j, imag: true, half_range: r_ub.clone() });
        }
        radius_ub.push(r_ub);
        radius_lb.push(r_lb);
    }

    let mut counts = Vec::with_capacity(axes.len());
    let mut total: usize = 1;
    for ax in &axes {
        let k = ceil_int(&(&ax.half_range / pitch))
            .to_usize()
            .unwrap_or(usize::MAX / 4);
        let n = 2 * k + 1;
        counts.push((k, n));
        total = total.saturating_mul(n);
        if total > 400_000 {
            return Ok(fail(vec![format!(
                "joint grid at pitch {} exceeds the point budget",
                pitch
            )]));
        }
    }

    let slack = rat(3, 4) * pitch;
    let reach = Rational::one() - delta - &slack;
    if !reach.is_positive() {
        return Ok(fail(vec!["pitch too coarse for the margin".into()]));
    }

    let mut idx = vec![0usize; axes.len()];
    let mut refutation: Option<Vec<(Rational, Rational)>> = None;
    let mut uncovered = false;
    'grid: loop {
        // materialise the joint point, one (re, im) pair per place
        let mut point: Vec<(Rational, Rational)> =
            vec![(Rational::zero(), Rational::zero()); arch.len()];
        for (a, ax) in axes.iter().enumerate() {
            let (k, _) = counts[a];
            let coord = Rational::from_integer(BigInt::from(idx[a] as i64 - k as i64)) * pitch;
            if ax.imag {
                point[ax.place].1 = coord;
            } else {
                point[ax.place].0 = coord;
            }
        }
        // position relative to the image region, with certainty both ways
        let mut inside_ub = true;
        let mut inside_lb = true;
        for (j, (place, _)) in arch.iter().enumerate() {
            let n2 = &point[j].0 * &point[j].0 + &point[j].1 * &point[j].1;
            let ub = &radius_ub[j];
            let lb = &radius_lb[j];
            if n2 > ub * ub {
                inside_ub = false;
            }
            // the real image interval is half-open; stay strictly inside
            let strict = matches!(place, Place::Real(_));
            if (strict && n2 >= lb * lb) || (!strict && n2 > lb * lb) {
                inside_lb = false;
            }
        }
        if inside_ub {
            let covered = balls.iter().any(|row| {
                row.iter()
                    .enumerate()
                    .all(|(j, b)| certainly_within_ball(&point[j], b, &reach))
            });
            if !covered {
                uncovered = true;
                if inside_lb
                    && refutation.is_none()
                    && balls.iter().all(|row| {
                        row.iter()
                            .enumerate()
                            .any(|(j, b)| certainly_outside_ball(&point[j], b, &Rational::one()))
                    })
                {
                    refutation = Some(point);
                    break 'grid;
                }
            }
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                break 'grid;
            }
            idx[pos] += 1;
            if idx[pos] < counts[pos].1 {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }

    if let Some(w) = refutation {
        return Ok(UntaggedOutcome {
            verdict: CoverVerdict::Refuted,
            notes: vec!["image point certifiably outside every digit window".into()],
            witness: Some(w),
        });
    }
    if uncovered {
        return Ok(fail(vec![format!("grid point uncovered at pitch {}", pitch)]));
    }
    Ok(UntaggedOutcome {
        verdict: CoverVerdict::Certified,
        notes: vec![format!("joint grid certified at pitch {}", pitch)],
        witness: None,
    })
}

/// Exact decision for a system whose only non-contracting archimedean place
/// is real: interval sweeps certify or refute without any grid.
fn untagged_single_real(
    ps: &PlaceSystem,
    alphabet: &Alphabet,
    delta: &Rational,
    place: &Place,
    bits: u32,
) -> Result<UntaggedOutcome> {
    let (r_lb, r_ub) = ps.beta_abs_bounds(place, 128)?;
    let mut lo = Vec::with_capacity(alphabet.digits.len());
    let mut hi = Vec::with_capacity(alphabet.digits.len());
    for digit in &alphabet.digits {
        let b = ps.embed_at(digit, place, bits)?;
        lo.push(&b.re - &b.rad);
        hi.push(&b.re + &b.rad);
    }
    let spec = SweepSpec { lo, hi };
    let w = Rational::one() - delta;
    if !w.is_positive() {
        return Ok(UntaggedOutcome {
            verdict: CoverVerdict::Indeterminate,
            notes: vec!["margin leaves no window".into()],
            witness: None,
        });
    }
    if real_sweep(&spec, &w, &r_ub).is_none() {
        return Ok(UntaggedOutcome {
            verdict: CoverVerdict::Certified,
            notes: vec![format!("interval sweep certified, radius {}", r_ub)],
            witness: None,
        });
    }
    // not covered with the margin; try to refute at margin zero within the
    // certainly-reached part of the image
    if let Some(y) = real_sweep(&spec, &Rational::one(), &r_lb) {
        let strictly_inside = y.abs() < r_lb;
        let outside_all = spec
            .lo
            .iter()
            .zip(&spec.hi)
            .all(|(l, h)| &y < &(l - Rational::one()) || &y > &(h + Rational::one()));
        if strictly_inside && outside_all {
            return Ok(UntaggedOutcome {
                verdict: CoverVerdict::Refuted,
                notes: vec!["image point further than one from every digit".into()],
                witness: Some(vec![(y, Rational::zero())]),
            });
        }
    }
    Ok(UntaggedOutcome {
        verdict: CoverVerdict::Indeterminate,
        notes: vec!["covered without margin but not with it".into()],
        witness: None,
    })
}

/// Validate that beta times the domain stays inside the union of translated
/// domains with overlap `delta`, for every radius m >= 1.
///
/// Tagged alphabets are validated place by place against their cover points
/// (with the certified tag error folded into the margin); plain ones get a
/// joint grid semi-decision that can also produce a refutation witness.
pub fn validate_cover(
    ps: &PlaceSystem,
    alphabet: &Alphabet,
    delta: &Rational,
    prec: PrecCtx,
) -> Result<CoverCertificate> {
    validate_cover_at(ps, alphabet, delta, prec, &rat(1, 8), 2)
}

/// Replay a certificate on a grid twice as fine and at doubled precision;
/// a genuine verdict must not change.
pub fn revalidate_cover(
    ps: &PlaceSystem,
    alphabet: &Alphabet,
    cert: &CoverCertificate,
    prec: PrecCtx,
) -> Result<bool> {
    let finer = &cert.pitch / rat(2, 1);
    let deeper = PrecCtx::new(prec.start_bits * 2, prec.max_bits * 2);
    let again = validate_cover_at(ps, alphabet, &cert.margin, deeper, &finer, 1)?;
    Ok(again.verdict == cert.verdict)
}

fn validate_cover_at(
    ps: &PlaceSystem,
    alphabet: &Alphabet,
    delta: &Rational,
    prec: PrecCtx,
    pitch0: &Rational,
    refinements: u32,
) -> Result<CoverCertificate> {
    if alphabet.digits.is_empty() {
        return Err(CoreError::Invalid("empty digit set".into()));
    }
    if delta.is_negative() {
        return Err(CoreError::Invalid("cover margin must be nonnegative".into()));
    }
    let mut notes = Vec::new();

    // finite places first: exact, and decisive either way
    if !ps.finite_places().is_empty() {
        let vals: Vec<Rational> = alphabet
            .digits
            .iter()
            .map(|d| d.to_rational().ok_or_else(|| {
                CoreError::Invalid("finite places demand rational digits".into())
            }))
            .collect::<Result<_>>()?;
        if let Some((p, j, e)) = finite_cover_gap(ps, &vals) {
            return Ok(CoverCertificate {
                verdict: CoverVerdict::Refuted,
                margin: delta.clone(),
                pitch: pitch0.clone(),
                notes: vec![format!(
                    "no digit matches the class {}/{}^{} at the finite place",
                    j, p, e
                )],
                witness: None,
            });
        }
        notes.push("finite residue classes complete".into());
    }

    if let Some(tags) = &alphabet.tags {
        if &alphabet.epsilon >= delta && !alphabet.epsilon.is_zero() {
            return Ok(CoverCertificate {
                verdict: CoverVerdict::Indeterminate,
                margin: delta.clone(),
                pitch: pitch0.clone(),
                notes: vec!["digit error must stay below the margin".into()],
                witness: None,
            });
        }
        if let Some(note) = check_tag_fidelity(ps, alphabet, prec)? {
            return Ok(CoverCertificate {
                verdict: CoverVerdict::Indeterminate,
                margin: delta.clone(),
                pitch: pitch0.clone(),
                notes: vec![note],
                witness: None,
            });
        }
        notes.push("tag errors certified".into());
        let arch = ps.sbeta_arch();
        let mut pitch = pitch0.clone();
        'refine: for round in 0..=refinements {
            let mut round_notes = notes.clone();
            for (j, (place, class)) in arch.iter().enumerate() {
                let pts: Vec<(Rational, Rational)> =
                    tags.iter().map(|row| row[j].clone()).collect();
                match check_tagged_place(ps, place, *class, &pts, delta, &alphabet.epsilon, &pitch)?
                {
                    PlaceCheck::Ok(n) => round_notes.push(n),
                    PlaceCheck::Fail(n) => {
                        if round < refinements {
                            pitch = &pitch / rat(2, 1);
                            continue 'refine;
                        }
                        round_notes.push(n);
                        return Ok(CoverCertificate {
                            verdict: CoverVerdict::Indeterminate,
                            margin: delta.clone(),
                            pitch,
                            notes: round_notes,
                            witness: None,
                        });
                    }
                }
            }
            return Ok(CoverCertificate {
                verdict: CoverVerdict::Certified,
                margin: delta.clone(),
                pitch,
                notes: round_notes,
                witness: None,
            });
        }
        unreachable!("refinement loop returns");
    }

    // untagged: joint semi-decision with pitch refinement
    let mut pitch = pitch0.clone();
    let mut bits = prec.start_bits.max(64);
    for round in 0..=refinements {
        let out = check_untagged(ps, alphabet, delta, &pitch, bits)?;
        match out.verdict {
            CoverVerdict::Indeterminate if round < refinements => {
                pitch = &pitch / rat(2, 1);
                bits = (bits * 2).min(prec.max_bits);
            }
            _ => {
                let mut all_notes = notes;
                all_notes.extend(out.notes);
                return Ok(CoverCertificate {
                    verdict: out.verdict,
                    margin: delta.clone(),
                    pitch,
                    notes: all_notes,
                    witness: out.witness,
                });
            }
        }
    }
    unreachable!("refinement loop returns");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::poly::IntPoly;

    fn system(coeffs: &[i64]) -> PlaceSystem {
        let field = NumberField::new(IntPoly::from_i64(coeffs), PrecCtx::default()).unwrap();
        PlaceSystem::new(field, PrecCtx::default()).unwrap()
    }

    fn salem_quartic() -> PlaceSystem {
        system(&[1, -1, -1, -1, 1])
    }

    #[test]
    fn approx_rational_target_is_exact() {
        let ps = system(&[-1, -1, 1]); // golden ratio, one non-contracting place
        let t = rat(3, 10);
        let z = weak_approximate(
            &ps,
            &[(t.clone(), Rational::zero())],
            &rat(1, 100),
            &BigInt::from(1000),
            PrecCtx::default(),
        )
        .unwrap();
        assert_eq!(z.to_rational(), Some(t));
    }

    #[test]
    fn approx_zero_targets_give_zero() {
        let ps = salem_quartic();
        let targets = vec![(Rational::zero(), Rational::zero()); ps.sbeta_arch().len()];
        let z = weak_approximate(&ps, &targets, &rat(1, 7), &BigInt::from(100), PrecCtx::default())
            .unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn approx_mixed_targets_certify_at_double_precision() {
        let ps = salem_quartic();
        let arch = ps.sbeta_arch();
        // zero at the expanding place, one at the circle place
        let targets: Vec<(Rational, Rational)> = arch
            .iter()
            .map(|(_, class)| match class {
                ModulusClass::UnitCircle => (Rational::one(), Rational::zero()),
                _ => (Rational::zero(), Rational::zero()),
            })
            .collect();
        let eps = rat(1, 20);
        let z = weak_approximate(&ps, &targets, &eps, &BigInt::from(1 << 20), PrecCtx::default())
            .unwrap();
        for (j, (place, _)) in arch.iter().enumerate() {
            let ball = ps.embed_at(&z, place, 256).unwrap();
            let diff = ball.sub(&Ball::exact(targets[j].0.clone(), targets[j].1.clone()));
            assert!(diff.abs_ub(256) < eps);
        }
    }

    #[test]
    fn approx_unreachable_target_exhausts_cap() {
        let ps = system(&[-1, -1, 1]);
        // an imaginary part at a real place cannot be approximated
        let err = weak_approximate(
            &ps,
            &[(rat(1, 3), rat(1, 2))],
            &rat(1, 10),
            &BigInt::from(4096),
            PrecCtx::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::DenominatorCapExceeded { .. }));
    }

    #[test]
    fn best_approx_picks_the_close_fraction() {
        let b = best_approx(&rat(3, 10), &BigInt::from(7));
        assert_eq!(b, rat(2, 7));
    }

    #[test]
    fn integer_base_guaranteed_alphabet() {
        let ps = system(&[-2, 1]);
        let a = suggest_alphabet(&ps, AlphabetMode::Guaranteed, PrecCtx::default()).unwrap();
        let vals: Vec<i64> = a
            .digits
            .iter()
            .map(|d| d.to_rational().unwrap().to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(vals, vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn complex_quadratic_integer_bound_is_minimal() {
        let ps = system(&[2, 2, 1]); // beta = -1 + i
        let a = suggest_alphabet(&ps, AlphabetMode::ComplexPisotBound, PrecCtx::default()).unwrap();
        assert_eq!(a.digits.len(), 5); // {-2..2}
    }

    #[test]
    fn golden_guaranteed_alphabet_certifies() {
        let ps = system(&[-1, -1, 1]);
        let a = suggest_alphabet(&ps, AlphabetMode::Guaranteed, PrecCtx::default()).unwrap();
        let vals: Vec<Rational> = a.digits.iter().map(|d| d.to_rational().unwrap()).collect();
        assert!(vals.contains(&Rational::zero()));
        let cert = validate_cover(&ps, &a, &default_margin(), PrecCtx::default()).unwrap();
        assert_eq!(cert.verdict, CoverVerdict::Certified);
    }

    #[test]
    fn salem_guaranteed_alphabet_certifies_and_revalidates() {
        let ps = salem_quartic();
        let a = suggest_alphabet(&ps, AlphabetMode::Guaranteed, PrecCtx::default()).unwrap();
        assert!(a.tags.is_some());
        let cert = validate_cover(&ps, &a, &default_margin(), PrecCtx::default()).unwrap();
        assert_eq!(cert.verdict, CoverVerdict::Certified, "notes: {:?}", cert.notes);
        assert!(revalidate_cover(&ps, &a, &cert, PrecCtx::default()).unwrap());
    }

    #[test]
    fn three_digit_cover_for_base_two_certifies_exactly() {
        let ps = system(&[-2, 1]);
        let a = Alphabet::integer_range(ps.field(), 1);
        let cert = validate_cover(&ps, &a, &Rational::zero(), PrecCtx::default()).unwrap();
        assert_eq!(cert.verdict, CoverVerdict::Certified);
    }

    #[test]
    fn binary_cover_refuted_at_minus_two() {
        let ps = system(&[-2, 1]);
        let a = Alphabet::plain(vec![ps.field().from_int(0), ps.field().from_int(1)]);
        let cert = validate_cover(&ps, &a, &Rational::zero(), PrecCtx::default()).unwrap();
        assert_eq!(cert.verdict, CoverVerdict::Refuted);
        let w = cert.witness.unwrap();
        assert!(w[0].0 <= rat(-3, 2));
    }

    #[test]
    fn rational_base_alphabet_covers_residues() {
        let ps = system(&[-3, 2]); // beta = 3/2
        let a = suggest_alphabet(&ps, AlphabetMode::Guaranteed, PrecCtx::default()).unwrap();
        // digits are half-integers and include a full residue system mod 2
        assert!(a.digits.iter().any(|d| d.to_rational() == Some(rat(1, 2))));
        let cert = validate_cover(&ps, &a, &default_margin(), PrecCtx::default()).unwrap();
        assert_eq!(cert.verdict, CoverVerdict::Certified, "notes: {:?}", cert.notes);
    }

    #[test]
    fn alphabet_json_shape() {
        let ps = system(&[-2, 1]);
        let a = Alphabet::integer_range(ps.field(), 1);
        let v = serde_json::to_value(&a).unwrap();
        assert_eq!(v["digits"][0]["coeffs"][0], "-1");
        assert_eq!(v["epsilon"], "0");
        assert!(v["tags"].is_null());
    }
}
