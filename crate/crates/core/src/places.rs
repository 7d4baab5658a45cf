//! Places of Q(beta) relevant to digit expansions.
//!
//! Archimedean places come from the certified root isolation of the defining
//! polynomial: one place per real root, one per conjugate pair. For a
//! rational base s/t the finite places dividing t join in. The system keeps
//! every root classified against the unit circle with a certificate:
//! strictly outside and strictly inside are decided by exact rational
//! comparisons on the isolation balls, and the number of roots exactly on
//! the circle is computed symbolically, so the ambiguous balls are pinned
//! down by counting rather than by trusting floating point.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::{eval_poly, Ball, PrecCtx};
use crate::error::{CoreError, Result};
use crate::field::{FieldElement, NumberField};
use crate::roots::{isolate_roots, on_circle_root_count};

pub use crate::roots::RootBall;

/// Position of a root relative to the unit circle, certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModulusClass {
    Expanding,
    UnitCircle,
    Contracting,
}

/// Coarse class of the base, named after the classical families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseLabel {
    #[serde(rename = "Pisot")]
    Pisot,
    #[serde(rename = "Salem")]
    Salem,
    #[serde(rename = "complexPisot")]
    ComplexPisot,
    #[serde(rename = "complexSalem")]
    ComplexSalem,
    #[serde(rename = "rationalInteger")]
    RationalInteger,
    #[serde(rename = "rationalNonInteger")]
    RationalNonInteger,
    #[serde(rename = "expandingOther")]
    ExpandingOther,
    #[serde(rename = "other")]
    Other,
}

impl fmt::Display for BaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BaseLabel::Pisot => "Pisot",
            BaseLabel::Salem => "Salem",
            BaseLabel::ComplexPisot => "complexPisot",
            BaseLabel::ComplexSalem => "complexSalem",
            BaseLabel::RationalInteger => "rationalInteger",
            BaseLabel::RationalNonInteger => "rationalNonInteger",
            BaseLabel::ExpandingOther => "expandingOther",
            BaseLabel::Other => "other",
        };
        write!(f, "{}", s)
    }
}

/// One place of the field: a real embedding, a conjugate pair of complex
/// embeddings, or a finite prime (rational bases only).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    Real(usize),
    ComplexPair(usize),
    Finite { prime: BigInt, exp: u32 },
}

impl Place {
    pub fn local_degree(&self) -> u32 {
        match self {
            Place::Real(_) => 1,
            Place::ComplexPair(_) => 2,
            Place::Finite { .. } => 1,
        }
    }

    pub fn root_index(&self) -> Option<usize> {
        match self {
            Place::Real(i) | Place::ComplexPair(i) => Some(*i),
            Place::Finite { .. } => None,
        }
    }
}

pub(crate) struct Analysis {
    pub roots: Vec<RootBall>,
    pub classes: Vec<ModulusClass>,
    pub distinguished: usize,
    pub on_circle: usize,
    pub bits: u32,
}

fn one_r() -> BigRational {
    BigRational::one()
}

/// Certainly |z| > 1 for every point of the ball: |center| > 1 + rad.
fn certainly_outside(b: &Ball) -> bool {
    let thr = one_r() + &b.rad;
    b.center_abs_sq() > &thr * &thr
}

/// Certainly |z| < 1 for every point of the ball: |center| < 1 - rad.
fn certainly_inside(b: &Ball) -> bool {
    let thr = one_r() - &b.rad;
    if thr.is_negative() {
        return false;
    }
    b.center_abs_sq() < &thr * &thr
}

/// Isolate and classify all roots, and certify a distinguished root of
/// maximal modulus. Works for any irreducible defining polynomial.
pub(crate) fn analyze(field: &NumberField, prec: PrecCtx) -> Result<Analysis> {
    let m = field.minpoly();
    if field.degree() == 1 {
        let beta = field.beta_rational().unwrap();
        let ball = Ball::from_rational(&beta);
        let a = beta.abs();
        let class = if a > one_r() {
            ModulusClass::Expanding
        } else if a < one_r() {
            ModulusClass::Contracting
        } else {
            ModulusClass::UnitCircle
        };
        return Ok(Analysis {
            roots: vec![RootBall { ball, is_real: true }],
            classes: vec![class],
            distinguished: 0,
            on_circle: usize::from(class == ModulusClass::UnitCircle),
            bits: 64,
        });
    }

    let on_circle = on_circle_root_count(m);
    let mut bits = 64u32;
    for _round in 0..40 {
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let roots = isolate_roots(m, &target, prec)?;
        let mut classes = Vec::with_capacity(roots.len());
        let mut ambiguous = 0usize;
        for rb in &roots {
            if certainly_outside(&rb.ball) {
                classes.push(ModulusClass::Expanding);
            } else if certainly_inside(&rb.ball) {
                classes.push(ModulusClass::Contracting);
            } else {
                classes.push(ModulusClass::UnitCircle); // provisional
                ambiguous += 1;
            }
        }
        if ambiguous == on_circle {
            if let Some(distinguished) = pick_distinguished(m, &roots, &classes, bits) {
                return Ok(Analysis { roots, classes, distinguished, on_circle, bits });
            }
        }
        bits = (bits * 2).min(prec.max_bits);
    }
    Err(CoreError::PrecisionExhausted {
        bits: prec.max_bits,
        context: format!("root classification did not stabilise for {}", m),
    })
}

/// Among the maximal modulus class, certify the set of maximal-modulus roots
/// and pick a canonical representative: the member with imaginary part >= 0
/// maximising (re, im). Ties across genuinely distinct moduli are resolved
/// by the isolation bounds; exact ties must be structural (conjugate pairs,
/// a +-symmetric polynomial, or all roots on the circle).
fn pick_distinguished(
    m: &crate::poly::IntPoly,
    roots: &[RootBall],
    classes: &[ModulusClass],
    bits: u32,
) -> Option<usize> {
    let has_expanding = classes.iter().any(|c| *c == ModulusClass::Expanding);
    let cand: Vec<usize> = if has_expanding {
        (0..roots.len())
            .filter(|&i| classes[i] == ModulusClass::Expanding)
            .collect()
    } else {
        (0..roots.len())
            .filter(|&i| classes[i] == ModulusClass::UnitCircle)
            .collect()
    };
    if cand.is_empty() {
        // all contracting cannot happen for a monic integer polynomial, but
        // stay defensive
        return Some(0);
    }
    // potential maxima: ub >= best lb
    let lbs: Vec<BigRational> = cand.iter().map(|&i| roots[i].ball.abs_lb(bits)).collect();
    let ubs: Vec<BigRational> = cand.iter().map(|&i| roots[i].ball.abs_ub(bits)).collect();
    let best_lb = lbs.iter().max().unwrap().clone();
    let pot: Vec<usize> = cand
        .iter()
        .enumerate()
        .filter(|(k, _)| ubs[*k] >= best_lb)
        .map(|(_, &i)| i)
        .collect();
    let tie_ok = if pot.len() == 1 {
        true
    } else if pot.iter().all(|&i| classes[i] == ModulusClass::UnitCircle) {
        true // all exactly on the circle
    } else if pot.len() == 2 && conj_partners(roots, pot[0], pot[1]) {
        true
    } else {
        pm_symmetric_family(m, roots, &pot)
    };
    if !tie_ok {
        return None;
    }
    // canonical representative: im >= 0, maximise (re, im); requires the
    // candidates' re intervals to be separated or the candidates identical
    let reps: Vec<usize> = pot
        .iter()
        .copied()
        .filter(|&i| !roots[i].ball.im.is_negative())
        .collect();
    let mut best = reps[0];
    for &i in &reps[1..] {
        let a = &roots[i].ball;
        let b = &roots[best].ball;
        if &a.re - &a.rad > &b.re + &b.rad {
            best = i;
        } else if !(&b.re - &b.rad > &a.re + &a.rad) {
            // re intervals overlap: equal re forces equal root for im >= 0
            // members of an equal-modulus set, so demand more precision
            if pot.len() > 1 && !(a.re == b.re && a.im == b.im) {
                return None;
            }
        }
    }
    Some(best)
}

fn conj_partners(roots: &[RootBall], i: usize, j: usize) -> bool {
    if roots[i].is_real || roots[j].is_real {
        return false;
    }
    let c = roots[i].ball.conj();
    c.re == roots[j].ball.re && c.im == roots[j].ball.im
}

/// Check that the potential set is exactly one orbit under negation (and
/// conjugation) for a polynomial with m(-x) = +-m(x); such roots share a
/// modulus exactly.
fn pm_symmetric_family(m: &crate::poly::IntPoly, roots: &[RootBall], pot: &[usize]) -> bool {
    let neg = m.substitute_neg();
    let sym = neg == *m || neg == m.scale_int(&BigInt::from(-1));
    if !sym {
        return false;
    }
    // partner of i: the unique ball not certainly disjoint from -B_i
    let mut family = std::collections::BTreeSet::new();
    let mut queue = vec![pot[0]];
    while let Some(i) = queue.pop() {
        if !family.insert(i) {
            continue;
        }
        let negated = roots[i].ball.neg();
        let mut partner = None;
        for (j, rb) in roots.iter().enumerate() {
            if !rb.ball.certainly_disjoint(&negated) {
                if partner.is_some() {
                    return false; // not resolved at this precision
                }
                partner = Some(j);
            }
        }
        match partner {
            Some(j) => queue.push(j),
            None => return false,
        }
        // close under conjugation as well
        if !roots[i].is_real {
            for (j, rb) in roots.iter().enumerate() {
                let c = roots[i].ball.conj();
                if rb.ball.re == c.re && rb.ball.im == c.im {
                    queue.push(j);
                }
            }
        }
    }
    let pot_set: std::collections::BTreeSet<usize> = pot.iter().copied().collect();
    family == pot_set
}

/// Label the base from its certified root classes.
pub(crate) fn label_from_analysis(field: &NumberField, an: &Analysis) -> BaseLabel {
    if field.degree() == 1 {
        let beta = field.beta_rational().unwrap();
        if beta.abs() <= one_r() {
            return BaseLabel::Other;
        }
        return if beta.is_integer() {
            BaseLabel::RationalInteger
        } else {
            BaseLabel::RationalNonInteger
        };
    }
    let expanding = an
        .classes
        .iter()
        .filter(|c| **c == ModulusClass::Expanding)
        .count();
    let unit = an.on_circle;
    let d = an.distinguished;
    if an.classes[d] != ModulusClass::Expanding {
        return BaseLabel::Other;
    }
    let dist = &an.roots[d];
    if dist.is_real {
        // real beta > 1: the ball certifies the sign since it excludes 0
        let positive = dist.ball.re.is_positive();
        if positive && expanding == 1 {
            return if unit == 0 { BaseLabel::Pisot } else { BaseLabel::Salem };
        }
        BaseLabel::ExpandingOther
    } else {
        if expanding == 2 {
            return if unit == 0 {
                BaseLabel::ComplexPisot
            } else {
                BaseLabel::ComplexSalem
            };
        }
        BaseLabel::ExpandingOther
    }
}

/// The places of Q(beta) with |beta| >= 1, plus the contracting archimedean
/// places (needed for distance bounds), with certified root data refinable
/// on demand.
pub struct PlaceSystem {
    field: NumberField,
    label: BaseLabel,
    roots: Vec<RootBall>,
    classes: Vec<ModulusClass>,
    distinguished: usize,
    base_bits: u32,
    finite: Vec<(BigInt, u32)>,
    cache: Mutex<BTreeMap<u32, Vec<RootBall>>>,
}

impl PlaceSystem {
    /// Build the place system; the distinguished root must be expanding.
    pub fn new(field: NumberField, prec: PrecCtx) -> Result<PlaceSystem> {
        Self::build(field, prec, None)
    }

    /// As `new`, but force the distinguished root to isolation index
    /// `index`. A lower conjugate is normalised to its upper partner, which
    /// carries the place.
    pub fn with_distinguished(
        field: NumberField,
        prec: PrecCtx,
        index: usize,
    ) -> Result<PlaceSystem> {
        Self::build(field, prec, Some(index))
    }

    fn build(field: NumberField, prec: PrecCtx, pick: Option<usize>) -> Result<PlaceSystem> {
        let mut an = analyze(&field, prec)?;
        if let Some(req) = pick {
            if req >= an.roots.len() {
                return Err(CoreError::RootIndexOutOfRange {
                    index: req,
                    count: an.roots.len(),
                });
            }
            let mut i = req;
            if an.roots[i].ball.im.is_negative() {
                let c = an.roots[i].ball.conj();
                if let Some(j) = an
                    .roots
                    .iter()
                    .position(|rb| rb.ball.re == c.re && rb.ball.im == c.im)
                {
                    i = j;
                }
            }
            an.distinguished = i;
        }
        let label = label_from_analysis(&field, &an);
        if an.classes[an.distinguished] != ModulusClass::Expanding {
            return Err(CoreError::BaseNotExpanding);
        }
        let mut finite = Vec::new();
        if field.degree() == 1 {
            let t = field.minpoly().leading().clone();
            finite = factor_small(&t)?;
        }
        Ok(PlaceSystem {
            field,
            label,
            roots: an.roots,
            classes: an.classes,
            distinguished: an.distinguished,
            base_bits: an.bits,
            finite,
            cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn label(&self) -> BaseLabel {
        self.label
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn roots(&self) -> &[RootBall] {
        &self.roots
    }

    pub fn classes(&self) -> &[ModulusClass] {
        &self.classes
    }

    pub fn root_class(&self, i: usize) -> ModulusClass {
        self.classes[i]
    }

    /// Archimedean places in canonical order (root order, conjugate pairs
    /// represented by their upper root), each tagged with its class.
    pub fn arch_places(&self) -> Vec<(Place, ModulusClass)> {
        let mut out = Vec::new();
        for (i, rb) in self.roots.iter().enumerate() {
            if rb.is_real {
                out.push((Place::Real(i), self.classes[i]));
            } else if !rb.ball.im.is_negative() {
                out.push((Place::ComplexPair(i), self.classes[i]));
            }
        }
        out
    }

    /// Non-contracting archimedean places in canonical order with their
    /// classes; the coordinate axes of the representation space.
    pub fn sbeta_arch(&self) -> Vec<(Place, ModulusClass)> {
        self.arch_places()
            .into_iter()
            .filter(|(_, c)| *c != ModulusClass::Contracting)
            .collect()
    }

    /// The representation-space places: archimedean with |beta| >= 1 plus
    /// the finite places over the denominator.
    pub fn s_beta(&self) -> Vec<Place> {
        let mut out: Vec<Place> = self
            .arch_places()
            .into_iter()
            .filter(|(_, c)| *c != ModulusClass::Contracting)
            .map(|(p, _)| p)
            .collect();
        for (p, e) in &self.finite {
            out.push(Place::Finite { prime: p.clone(), exp: *e });
        }
        out
    }

    pub fn expanding_arch(&self) -> Vec<Place> {
        self.arch_places()
            .into_iter()
            .filter(|(_, c)| *c == ModulusClass::Expanding)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn unit_arch(&self) -> Vec<Place> {
        self.arch_places()
            .into_iter()
            .filter(|(_, c)| *c == ModulusClass::UnitCircle)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn contracting_arch(&self) -> Vec<Place> {
        self.arch_places()
            .into_iter()
            .filter(|(_, c)| *c == ModulusClass::Contracting)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn finite_places(&self) -> Vec<Place> {
        self.finite
            .iter()
            .map(|(p, e)| Place::Finite { prime: p.clone(), exp: *e })
            .collect()
    }

    /// The distinguished place (the one carrying beta itself).
    pub fn distinguished_place(&self) -> Place {
        if self.roots[self.distinguished].is_real {
            Place::Real(self.distinguished)
        } else {
            Place::ComplexPair(self.distinguished)
        }
    }

    /// Root ball for index `i`, refined so the radius is at most 2^-bits.
    /// Indices stay aligned with the base isolation across refinements.
    pub fn root_at(&self, i: usize, bits: u32) -> Result<RootBall> {
        if bits <= self.base_bits || self.roots[i].ball.is_exact() {
            return Ok(self.roots[i].clone());
        }
        let mut cache = self.cache.lock().unwrap();
        if let Some((_, refined)) = cache.range(bits..).next() {
            return Ok(refined[i].clone());
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let prec = PrecCtx { start_bits: bits, max_bits: (4 * bits).max(4096) };
        let fresh = isolate_roots(self.field.minpoly(), &target, prec)?;
        // align to base order by overlap with the base balls
        let mut aligned: Vec<Option<RootBall>> = vec![None; self.roots.len()];
        for rb in fresh {
            let mut hit = None;
            for (j, base) in self.roots.iter().enumerate() {
                if !base.ball.certainly_disjoint(&rb.ball) {
                    if hit.is_some() {
                        return Err(CoreError::PrecisionExhausted {
                            bits,
                            context: "refined root matches several coarse balls".into(),
                        });
                    }
                    hit = Some(j);
                }
            }
            let j = hit.ok_or_else(|| CoreError::PrecisionExhausted {
                bits,
                context: "refined root matches no coarse ball".into(),
            })?;
            if aligned[j].is_some() {
                return Err(CoreError::PrecisionExhausted {
                    bits,
                    context: "two refined roots match one coarse ball".into(),
                });
            }
            aligned[j] = Some(rb);
        }
        let refined: Vec<RootBall> = aligned.into_iter().map(|o| o.unwrap()).collect();
        let out = refined[i].clone();
        cache.insert(bits, refined);
        Ok(out)
    }

    /// Image of a field element under the embedding at root `i`,
    /// as a certified ball.
    pub fn embed(&self, x: &FieldElement, i: usize, bits: u32) -> Result<Ball> {
        let rb = self.root_at(i, bits)?;
        Ok(eval_poly(x.coeffs(), &rb.ball, bits))
    }

    /// Image at a place; finite places use `finite_abs` instead.
    pub fn embed_at(&self, x: &FieldElement, place: &Place, bits: u32) -> Result<Ball> {
        match place {
            Place::Real(i) | Place::ComplexPair(i) => self.embed(x, *i, bits),
            Place::Finite { .. } => Err(CoreError::Invalid(
                "finite places have no archimedean embedding".into(),
            )),
        }
    }

    /// Exact p-adic absolute value of a rational (finite places exist only
    /// over Q, so elements there are rationals).
    pub fn finite_abs(x: &BigRational, prime: &BigInt) -> BigRational {
        if x.is_zero() {
            return BigRational::zero();
        }
        let v = padic_val(x.numer(), prime) - padic_val(x.denom(), prime);
        let p = BigRational::from_integer(prime.clone());
        if v >= 0 {
            let mut acc = one_r();
            for _ in 0..v {
                acc /= &p;
            }
            acc
        } else {
            let mut acc = one_r();
            for _ in 0..(-v) {
                acc *= &p;
            }
            acc
        }
    }

    /// |beta| at a place: certified bounds (lb, ub) for archimedean places,
    /// exact for finite ones.
    pub fn beta_abs_bounds(&self, place: &Place, bits: u32) -> Result<(BigRational, BigRational)> {
        match place {
            Place::Real(i) | Place::ComplexPair(i) => {
                let rb = self.root_at(*i, bits)?;
                Ok((rb.ball.abs_lb(bits), rb.ball.abs_ub(bits)))
            }
            Place::Finite { prime, exp } => {
                // v_p(beta) = -exp, so |beta|_p = p^exp
                let mut acc = one_r();
                let p = BigRational::from_integer(prime.clone());
                for _ in 0..*exp {
                    acc *= &p;
                }
                Ok((acc.clone(), acc))
            }
        }
    }

    /// JSON dump of the root data: centers and radii as floats, the
    /// distinguished index and the class label.
    pub fn dump(&self) -> serde_json::Value {
        let roots: Vec<serde_json::Value> = self
            .roots
            .iter()
            .map(|rb| {
                let (re, im) = rb.ball.to_f64();
                serde_json::json!({
                    "re": re,
                    "im": im,
                    "rad": rb.ball.rad.to_f64().unwrap_or(0.0),
                })
            })
            .collect();
        serde_json::json!({
            "roots": roots,
            "distinguished": self.distinguished,
            "class": self.label.to_string(),
        })
    }
}

fn padic_val(n: &BigInt, p: &BigInt) -> i64 {
    let mut v = 0i64;
    let mut m = n.clone();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// Factor a small positive integer by trial division.
fn factor_small(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    let mut out = Vec::new();
    let mut m = n.clone();
    if m.is_negative() {
        m = -m;
    }
    if m > BigInt::from(1_000_000_000_000u64) {
        return Err(CoreError::Invalid("denominator too large to factor".into()));
    }
    let mut m64 = m.to_u64().unwrap();
    let mut p = 2u64;
    while p * p <= m64 {
        if m64 % p == 0 {
            let mut e = 0u32;
            while m64 % p == 0 {
                m64 /= p;
                e += 1;
            }
            out.push((BigInt::from(p), e));
        }
        p += 1;
    }
    if m64 > 1 {
        out.push((BigInt::from(m64), 1));
    }
    Ok(out)
}

/// Classify a base from its defining polynomial; total over irreducible
/// polynomials, expanding or not.
pub fn classify_base(field: &NumberField, prec: PrecCtx) -> Result<BaseLabel> {
    let an = analyze(field, prec)?;
    Ok(label_from_analysis(field, &an))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    fn system(coeffs: &[i64]) -> PlaceSystem {
        let f = NumberField::new(IntPoly::from_i64(coeffs), PrecCtx::default()).unwrap();
        PlaceSystem::new(f, PrecCtx::default()).unwrap()
    }

    fn label_of(coeffs: &[i64]) -> BaseLabel {
        let f = NumberField::new(IntPoly::from_i64(coeffs), PrecCtx::default()).unwrap();
        classify_base(&f, PrecCtx::default()).unwrap()
    }

    #[test]
    fn classic_labels() {
        assert_eq!(label_of(&[-1, -1, 1]), BaseLabel::Pisot);
        assert_eq!(label_of(&[1, -1, -1, -1, 1]), BaseLabel::Salem);
        assert_eq!(label_of(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]), BaseLabel::Salem);
        assert_eq!(label_of(&[-2, 1]), BaseLabel::RationalInteger);
        assert_eq!(label_of(&[-3, 2]), BaseLabel::RationalNonInteger);
        assert_eq!(label_of(&[-5, 0, 1]), BaseLabel::ExpandingOther);
        // beta = -1 + i: x^2 + 2x + 2
        assert_eq!(label_of(&[2, 2, 1]), BaseLabel::ComplexPisot);
        // x^2 + 1 has both roots on the circle
        assert_eq!(label_of(&[1, 0, 1]), BaseLabel::Other);
        // 1/2 is contracting
        assert_eq!(label_of(&[-1, 2]), BaseLabel::Other);
        // tribonacci: Pisot
        assert_eq!(label_of(&[-1, -1, -1, 1]), BaseLabel::Pisot);
    }

    #[test]
    fn distinguished_prefers_positive_real() {
        let s = system(&[-5, 0, 1]);
        let d = s.distinguished();
        assert!(s.roots()[d].is_real);
        assert!(s.roots()[d].ball.re.is_positive());
        assert_eq!(s.label(), BaseLabel::ExpandingOther);
    }

    #[test]
    fn distinguished_can_be_forced() {
        let f = NumberField::new(IntPoly::from_i64(&[-5, 0, 1]), PrecCtx::default()).unwrap();
        let s = PlaceSystem::with_distinguished(f.clone(), PrecCtx::default(), 0).unwrap();
        let d = s.distinguished();
        assert!(s.roots()[d].ball.re.is_negative());

        match PlaceSystem::with_distinguished(f.clone(), PrecCtx::default(), 9) {
            Err(CoreError::RootIndexOutOfRange { count: 2, .. }) => {}
            _ => panic!("expected an out-of-range error"),
        }

        // a contracting root cannot be the base
        let golden = NumberField::new(IntPoly::from_i64(&[-1, -1, 1]), PrecCtx::default()).unwrap();
        match PlaceSystem::with_distinguished(golden, PrecCtx::default(), 0) {
            Err(CoreError::BaseNotExpanding) => {}
            _ => panic!("expected a non-expanding refusal"),
        }
    }

    #[test]
    fn salem_place_split() {
        let s = system(&[1, -1, -1, -1, 1]);
        assert_eq!(s.expanding_arch().len(), 1);
        assert_eq!(s.unit_arch().len(), 1); // one conjugate pair
        assert_eq!(s.contracting_arch().len(), 1); // 1/beta
        assert_eq!(s.s_beta().len(), 2);
        assert_eq!(s.label(), BaseLabel::Salem);
        let d = s.distinguished();
        assert!(s.roots()[d].is_real);
        assert_eq!(s.root_class(d), ModulusClass::Expanding);
    }

    #[test]
    fn rational_base_finite_places() {
        let s = system(&[-3, 2]);
        let fin = s.finite_places();
        assert_eq!(fin.len(), 1);
        match &fin[0] {
            Place::Finite { prime, exp } => {
                assert_eq!(prime, &BigInt::from(2));
                assert_eq!(*exp, 1);
            }
            other => panic!("expected finite place, got {:?}", other),
        }
        // |1/6|_2 = 2
        let x = BigRational::new(BigInt::from(1), BigInt::from(6));
        assert_eq!(
            PlaceSystem::finite_abs(&x, &BigInt::from(2)),
            BigRational::from_integer(BigInt::from(2))
        );
        assert_eq!(
            PlaceSystem::finite_abs(&x, &BigInt::from(3)),
            BigRational::from_integer(BigInt::from(3))
        );
        let (lo, hi) = s
            .beta_abs_bounds(&fin[0], 64)
            .unwrap();
        assert_eq!(lo, BigRational::from_integer(BigInt::from(2)));
        assert_eq!(lo, hi);
    }

    #[test]
    fn embedding_evaluates_field_elements() {
        let s = system(&[-1, -1, 1]);
        let f = s.field().clone();
        let b = f.beta();
        let d = s.distinguished();
        // beta^2 - beta - 1 = 0 at the distinguished root, certified small
        let e = b.mul(&b).sub(&b).sub(&f.one());
        let img = s.embed(&e, d, 128).unwrap();
        assert!(img.abs_ub(128) < BigRational::new(BigInt::one(), BigInt::one() << 100));
        // beta itself lands near 1.618
        let img_b = s.embed(&b, d, 64).unwrap();
        let (re, im) = img_b.to_f64();
        assert!((re - 1.6180339887).abs() < 1e-9);
        assert_eq!(im, 0.0);
    }

    #[test]
    fn refinement_keeps_indices() {
        let s = system(&[1, -1, -1, -1, 1]);
        for bits in [80u32, 160, 320] {
            for i in 0..4 {
                let rb = s.root_at(i, bits).unwrap();
                assert!(
                    rb.ball.rad <= BigRational::new(BigInt::one(), BigInt::one() << bits)
                );
                assert!(!rb.ball.certainly_disjoint(&s.roots()[i].ball));
                assert_eq!(rb.is_real, s.roots()[i].is_real);
            }
        }
    }

    #[test]
    fn non_expanding_base_rejected() {
        let f = NumberField::new(IntPoly::from_i64(&[1, 0, 1]), PrecCtx::default()).unwrap();
        assert!(matches!(
            PlaceSystem::new(f, PrecCtx::default()),
            Err(CoreError::BaseNotExpanding)
        ));
    }

    #[test]
    fn dump_shape() {
        let s = system(&[1, -1, -1, -1, 1]);
        let d = s.dump();
        assert_eq!(d["class"], "Salem");
        assert_eq!(d["roots"].as_array().unwrap().len(), 4);
        assert!(d["distinguished"].as_u64().is_some());
    }
}
