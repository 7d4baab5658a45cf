//! The expansion engine: eventually periodic digit strings in base beta.
//!
//! A value x is shifted to v = x * beta^-L inside the admissible domain, then
//! iterated under v -> beta*v - a with digits a from the alphabet. States are
//! exact field elements, so a repeated state is an exact proof of eventual
//! periodicity and the reconstructed value is exactly x; the digit choice
//! itself may be heuristic (empirical mode) without compromising that proof.
//! Cycle detection is Brent's algorithm over exact states, which keeps memory
//! flat over long orbits, followed by one replay pass to record digits.
//!
//! The admissible domain keeps |x| <= 1 at expanding archimedean places,
//! |x| <= m at unit-circle places, and |x|_p <= 1 at the finite places of a
//! rational base. The bound m is fixed per run as max(1, eps + max unit-place
//! size of the input), so shifting by beta (which moves nothing at unit
//! places) cannot invalidate it.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::ball::PrecCtx;
use crate::error::{CoreError, Result};
use crate::field::{FieldElement, NumberField, Rational};
use crate::places::{ModulusClass, Place, PlaceSystem};
use crate::poly::IntPoly;

/// Digit selection discipline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Fast floating hints pick digits; the resulting cycle is still an
    /// exact proof, but termination is not guaranteed in advance.
    Empirical,
    /// Every digit is certified to keep the orbit in the domain; fails
    /// honestly when no digit is admissible or precision runs out.
    Guaranteed,
}

/// Knobs for a representation run.
#[derive(Clone, Debug)]
pub struct Policy {
    pub mode: Mode,
    /// Bound on preperiod + period length.
    pub max_steps: u64,
    pub prec: PrecCtx,
    /// Abort when a state's coefficient denominators outgrow this.
    pub denominator_cap: Option<BigInt>,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            mode: Mode::Empirical,
            max_steps: 1_000_000,
            prec: PrecCtx::default(),
            denominator_cap: None,
        }
    }
}

/// The admissible domain data for one run: alphabet, approximation slack and
/// the unit-place radius m >= 1.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub alphabet: Vec<FieldElement>,
    pub epsilon: Rational,
    pub m: Rational,
}

impl DomainSpec {
    /// Domain sized for a specific input: m = max(1, eps + max |x| over
    /// unit-circle places).
    pub fn for_value(
        ps: &PlaceSystem,
        alphabet: Vec<FieldElement>,
        epsilon: Rational,
        x: &FieldElement,
    ) -> Result<DomainSpec> {
        Self::validate_alphabet(ps, &alphabet)?;
        x.same_field(&ps.field().one())?;
        let mut m = BigRational::one();
        let bits = 96;
        for p in ps.unit_arch() {
            let b = ps.embed_at(x, &p, bits)?;
            let cand = &epsilon + b.abs_ub(bits);
            if cand > m {
                m = cand;
            }
        }
        Ok(DomainSpec { alphabet, epsilon, m })
    }

    /// Domain with an explicit unit-place radius (clamped to at least 1).
    pub fn with_m(
        ps: &PlaceSystem,
        alphabet: Vec<FieldElement>,
        epsilon: Rational,
        m: Rational,
    ) -> Result<DomainSpec> {
        Self::validate_alphabet(ps, &alphabet)?;
        let m = if m < BigRational::one() { BigRational::one() } else { m };
        Ok(DomainSpec { alphabet, epsilon, m })
    }

    fn validate_alphabet(ps: &PlaceSystem, alphabet: &[FieldElement]) -> Result<()> {
        if alphabet.is_empty() {
            return Err(CoreError::Invalid("alphabet must be nonempty".into()));
        }
        let one = ps.field().one();
        for a in alphabet {
            a.same_field(&one)?;
        }
        Ok(())
    }
}

/// An eventually periodic expansion: x = beta^L * sum_j a_{d_j} beta^-j with
/// the digit index stream d = preperiod then period repeated. Digits are
/// indices into the alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub minpoly: IntPoly,
    pub alphabet: Vec<FieldElement>,
    pub l_shift: i64,
    pub preperiod: Vec<usize>,
    pub period: Vec<usize>,
}

impl Serialize for Representation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Representation", 5)?;
        st.serialize_field("minpoly", &self.minpoly)?;
        let alpha: Vec<Vec<String>> = self.alphabet.iter().map(|a| a.coeff_strings()).collect();
        st.serialize_field("alphabet", &alpha)?;
        st.serialize_field("L", &self.l_shift)?;
        st.serialize_field("preperiod", &self.preperiod)?;
        st.serialize_field("period", &self.period)?;
        st.end()
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L={} pre={:?} per={:?}",
            self.l_shift, self.preperiod, self.period
        )
    }
}

/// Exact orbit data from a traced run; `states[k]` is the state after k
/// steps, with `states[preperiod_len + period_len] == states[preperiod_len]`.
#[derive(Clone, Debug)]
pub struct OrbitTrace {
    pub l_shift: i64,
    pub m: Rational,
    pub states: Vec<FieldElement>,
    pub digits: Vec<usize>,
    pub preperiod_len: usize,
}

/// Certified domain membership, decided on a rising precision ladder.
///
/// Real places use the half-open window [-r, r), matching the classical
/// greedy convention for integer bases (state exactly r shifts down, state
/// exactly -r stays). Boundary ties at real places are decided exactly: the
/// embedding hits a rational r only when x equals r as a field element.
/// Complex places use the closed disk; a value exactly on that circle cannot
/// be separated numerically and exhausts the ladder honestly.
pub fn in_domain(ps: &PlaceSystem, x: &FieldElement, m: &Rational, prec: PrecCtx) -> Result<bool> {
    // finite places are exact and cheap: do them first
    for p in ps.finite_places() {
        if let Place::Finite { prime, .. } = &p {
            let q = x
                .to_rational()
                .ok_or_else(|| CoreError::Invalid("finite places only arise over Q".into()))?;
            if PlaceSystem::finite_abs(&q, prime) > BigRational::one() {
                return Ok(false);
            }
        }
    }
    let arch: Vec<(Place, Rational)> = ps
        .arch_places()
        .into_iter()
        .filter_map(|(p, c)| match c {
            ModulusClass::Expanding => Some((p, BigRational::one())),
            ModulusClass::UnitCircle => Some((p, m.clone())),
            ModulusClass::Contracting => None,
        })
        .collect();
    let mut undecided: Vec<(Place, Rational)> = arch;
    for bits in prec.ladder() {
        let mut still = Vec::new();
        for (p, bound) in undecided {
            let b = ps.embed_at(x, &p, bits)?;
            if matches!(p, Place::Real(_)) {
                // the embedding is real: the ball is the interval
                // [re - rad, re + rad], compared against [-bound, bound)
                let lo = &b.re - &b.rad;
                let hi = &b.re + &b.rad;
                if hi < bound && lo >= -bound.clone() {
                    continue; // certainly inside
                }
                if lo >= bound || hi < -bound.clone() {
                    return Ok(false); // certainly outside (right edge is out)
                }
                // straddles a boundary: decide exactly via field equality
                if *x == ps.field().from_rational(bound.clone()) {
                    return Ok(false); // exactly +r: excluded
                }
                if *x == ps.field().from_rational(-bound.clone()) {
                    continue; // exactly -r: included
                }
                still.push((p, bound));
            } else {
                match b.cmp_abs_leq(&bound) {
                    Some(true) => {}
                    Some(false) => return Ok(false),
                    None => still.push((p, bound)),
                }
            }
        }
        if still.is_empty() {
            return Ok(true);
        }
        undecided = still;
    }
    Err(CoreError::PrecisionExhausted {
        bits: prec.max_bits,
        context: "domain membership undecided".into(),
    })
}

/// Smallest L >= 0 with x * beta^-L in the domain, together with the shifted
/// value.
pub fn shift_l(
    ps: &PlaceSystem,
    dom: &DomainSpec,
    x: &FieldElement,
    prec: PrecCtx,
) -> Result<(i64, FieldElement)> {
    let binv = ps.field().beta().inverse()?;
    let mut v = x.clone();
    let mut l = 0i64;
    loop {
        if in_domain(ps, &v, &dom.m, prec)? {
            return Ok((l, v));
        }
        v = v.mul(&binv);
        l += 1;
        if l > 1_000_000 {
            return Err(CoreError::Invalid("shift exponent out of range".into()));
        }
    }
}

struct ShadowPlace {
    root: Complex64,
    real: bool,
    bound: f64,
}

struct Stepper<'a> {
    ps: &'a PlaceSystem,
    dom: &'a DomainSpec,
    mode: Mode,
    prec: PrecCtx,
    // floating shadows for the empirical digit rule
    shadow: Vec<ShadowPlace>,
    alpha: Vec<Vec<Complex64>>,
    expanding_mask: Vec<bool>,
    finite: Vec<BigInt>,
}

const F64_SLACK: f64 = 1e-9;

fn horner_c64(coeffs: &[BigRational], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
    }
    acc
}

impl<'a> Stepper<'a> {
    fn new(ps: &'a PlaceSystem, dom: &'a DomainSpec, mode: Mode, prec: PrecCtx) -> Stepper<'a> {
        let m_f64 = dom.m.to_f64().unwrap_or(1.0);
        let mut shadow = Vec::new();
        let mut expanding_mask = Vec::new();
        for (p, c) in ps.arch_places() {
            let bound = match c {
                ModulusClass::Expanding => 1.0,
                ModulusClass::UnitCircle => m_f64,
                ModulusClass::Contracting => continue,
            };
            if let Some(i) = p.root_index() {
                let (re, im) = ps.roots()[i].ball.to_f64();
                shadow.push(ShadowPlace {
                    root: Complex64::new(re, im),
                    real: ps.roots()[i].is_real,
                    bound,
                });
                expanding_mask.push(c == ModulusClass::Expanding);
            }
        }
        let alpha: Vec<Vec<Complex64>> = dom
            .alphabet
            .iter()
            .map(|a| {
                shadow
                    .iter()
                    .map(|sp| horner_c64(a.coeffs(), sp.root))
                    .collect()
            })
            .collect();
        let finite = ps
            .finite_places()
            .into_iter()
            .filter_map(|p| match p {
                Place::Finite { prime, .. } => Some(prime),
                _ => None,
            })
            .collect();
        Stepper { ps, dom, mode, prec, shadow, alpha, expanding_mask, finite }
    }

    fn finite_ok(&self, z: &FieldElement) -> bool {
        if self.finite.is_empty() {
            return true;
        }
        match z.to_rational() {
            Some(q) => self
                .finite
                .iter()
                .all(|p| PlaceSystem::finite_abs(&q, p) <= BigRational::one()),
            None => false,
        }
    }

    /// One transition: pick a digit for state v, return (digit, beta*v - a).
    fn step(&self, v: &FieldElement) -> Result<(usize, FieldElement)> {
        match self.mode {
            Mode::Empirical => self.step_empirical(v),
            Mode::Guaranteed => self.step_guaranteed(v),
        }
    }

    fn step_empirical(&self, v: &FieldElement) -> Result<(usize, FieldElement)> {
        let bv = v.mul_beta();
        let sv: Vec<Complex64> = self
            .shadow
            .iter()
            .map(|sp| horner_c64(bv.coeffs(), sp.root))
            .collect();
        let n = self.dom.alphabet.len();
        // first digit that keeps every coordinate inside, mirroring the
        // half-open real window of the certified check
        'cand: for k in 0..n {
            for (j, sp) in self.shadow.iter().enumerate() {
                let z = sv[j] - self.alpha[k][j];
                if sp.real {
                    if !(z.re >= -sp.bound - F64_SLACK && z.re < sp.bound) {
                        continue 'cand;
                    }
                } else if z.norm() > sp.bound + F64_SLACK {
                    continue 'cand;
                }
            }
            let next = bv.sub(&self.dom.alphabet[k]);
            if !self.finite_ok(&next) {
                continue 'cand;
            }
            return Ok((k, next));
        }
        // no digit passes: greedy fallback minimising the expanding
        // coordinates, still honouring exact finite constraints if possible
        let mut best: Option<(usize, f64, FieldElement)> = None;
        let mut best_any: Option<(usize, f64, FieldElement)> = None;
        for k in 0..n {
            let mut worst = 0.0f64;
            for (j, sp) in self.shadow.iter().enumerate() {
                if self.expanding_mask[j] {
                    worst = worst.max((sv[j] - self.alpha[k][j]).norm() / sp.bound);
                }
            }
            let next = bv.sub(&self.dom.alphabet[k]);
            if best_any.as_ref().map_or(true, |(_, w, _)| worst < *w) {
                best_any = Some((k, worst, next.clone()));
            }
            if self.finite_ok(&next) && best.as_ref().map_or(true, |(_, w, _)| worst < *w) {
                best = Some((k, worst, next));
            }
        }
        let (k, _, next) = best.or(best_any).expect("alphabet nonempty");
        Ok((k, next))
    }

    fn step_guaranteed(&self, v: &FieldElement) -> Result<(usize, FieldElement)> {
        let bv = v.mul_beta();
        for (k, a) in self.dom.alphabet.iter().enumerate() {
            let next = bv.sub(a);
            if in_domain(self.ps, &next, &self.dom.m, self.prec)? {
                return Ok((k, next));
            }
        }
        Err(CoreError::NoAdmissibleDigit { state: v.to_string() })
    }
}

/// Compute an eventually periodic expansion of x.
pub fn represent(
    ps: &PlaceSystem,
    dom: &DomainSpec,
    x: &FieldElement,
    policy: &Policy,
) -> Result<Representation> {
    run(ps, dom, x, policy, false).map(|(r, _)| r)
}

/// As `represent`, also returning the exact orbit.
pub fn represent_traced(
    ps: &PlaceSystem,
    dom: &DomainSpec,
    x: &FieldElement,
    policy: &Policy,
) -> Result<(Representation, OrbitTrace)> {
    let (r, t) = run(ps, dom, x, policy, true)?;
    Ok((r, t.expect("trace requested")))
}

fn run(
    ps: &PlaceSystem,
    dom: &DomainSpec,
    x: &FieldElement,
    policy: &Policy,
    want_trace: bool,
) -> Result<(Representation, Option<OrbitTrace>)> {
    x.same_field(&ps.field().one())?;
    let (l_shift, v0) = shift_l(ps, dom, x, policy.prec)?;
    let stepper = Stepper::new(ps, dom, policy.mode, policy.prec);
    let cap = policy.max_steps;

    let check_denom = |v: &FieldElement| -> Result<()> {
        if let Some(capd) = &policy.denominator_cap {
            if &v.denominator_lcm() > capd {
                return Err(CoreError::DenominatorCapExceeded { cap: capd.clone() });
            }
        }
        Ok(())
    };

    // Brent: find the period length first
    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = v0.clone();
    let (_, mut hare) = stepper.step(&v0)?;
    check_denom(&hare)?;
    let mut steps: u64 = 1;
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power = power.saturating_mul(2);
            lam = 0;
        }
        let (_, h) = stepper.step(&hare)?;
        hare = h;
        check_denom(&hare)?;
        lam += 1;
        steps += 1;
        if steps > cap.saturating_mul(2).saturating_add(8) {
            return Err(CoreError::IterationCapExceeded { cap });
        }
    }
    // find the preperiod length
    let mut mu: u64 = 0;
    tortoise = v0.clone();
    hare = v0.clone();
    for _ in 0..lam {
        let (_, h) = stepper.step(&hare)?;
        hare = h;
    }
    while tortoise != hare {
        let (_, t) = stepper.step(&tortoise)?;
        tortoise = t;
        let (_, h) = stepper.step(&hare)?;
        hare = h;
        mu += 1;
        if mu > cap {
            return Err(CoreError::IterationCapExceeded { cap });
        }
    }
    if mu + lam > cap {
        return Err(CoreError::IterationCapExceeded { cap });
    }

    // replay recording digits (and states when traced)
    let total = (mu + lam) as usize;
    let mut digits = Vec::with_capacity(total);
    let mut states = if want_trace { Vec::with_capacity(total + 1) } else { Vec::new() };
    let mut v = v0.clone();
    if want_trace {
        states.push(v.clone());
    }
    for _ in 0..total {
        let (k, next) = stepper.step(&v)?;
        digits.push(k);
        v = next;
        if want_trace {
            states.push(v.clone());
        }
    }

    let rep = Representation {
        minpoly: ps.field().minpoly().clone(),
        alphabet: dom.alphabet.clone(),
        l_shift,
        preperiod: digits[..mu as usize].to_vec(),
        period: digits[mu as usize..].to_vec(),
    };
    let trace = want_trace.then(|| OrbitTrace {
        l_shift,
        m: dom.m.clone(),
        states,
        digits,
        preperiod_len: mu as usize,
    });
    Ok((rep, trace))
}

fn digit_at(rep: &Representation, j: usize) -> usize {
    // 1-based stream position
    let mu = rep.preperiod.len();
    if j <= mu {
        rep.preperiod[j - 1]
    } else {
        rep.period[(j - mu - 1) % rep.period.len()]
    }
}

fn check_structure(rep: &Representation) -> Result<()> {
    if rep.period.is_empty() {
        return Err(CoreError::Invalid("period must be nonempty".into()));
    }
    let n = rep.alphabet.len();
    if rep
        .preperiod
        .iter()
        .chain(rep.period.iter())
        .any(|&k| k >= n)
    {
        return Err(CoreError::Invalid("digit index out of alphabet range".into()));
    }
    Ok(())
}

/// Exact value of a representation in the given field. The periodic tail is
/// folded through the closed form c = (sum a_j beta^{pi - j}) / (beta^pi - 1).
pub fn value_of(rep: &Representation, field: &NumberField) -> Result<FieldElement> {
    check_structure(rep)?;
    if rep.minpoly != *field.minpoly() {
        return Err(CoreError::FieldMismatch);
    }
    let beta = field.beta();
    let pi = rep.period.len() as i64;
    // Horner: num = sum a_j beta^{pi - (j+1)} without refolding powers
    let mut num = field.zero();
    for &k in rep.period.iter() {
        num = num.mul_beta().add(&rep.alphabet[k]);
    }
    let den = beta.pow(pi)?.sub(&field.one());
    let c = num.div(&den)?;
    // fold the preperiod backwards: u := (u + a_j) / beta
    let binv = beta.inverse()?;
    let mut u = c;
    for &k in rep.preperiod.iter().rev() {
        u = u.add(&rep.alphabet[k]).mul(&binv);
    }
    Ok(u.mul(&beta.pow(rep.l_shift)?))
}

/// Structural checks plus exact equality of the reconstructed value.
pub fn verify(rep: &Representation, expected: &FieldElement) -> Result<bool> {
    let v = value_of(rep, expected.field())?;
    Ok(v == *expected)
}

/// Split into the part carried by nonnegative powers of beta (stream
/// positions j <= L) and the strictly fractional remainder; the two sum to
/// the represented value exactly.
pub fn split_parts(
    rep: &Representation,
    field: &NumberField,
) -> Result<(FieldElement, FieldElement)> {
    check_structure(rep)?;
    let total = value_of(rep, field)?;
    let beta = field.beta();
    let mut int_part = field.zero();
    if rep.l_shift > 0 {
        for j in 1..=(rep.l_shift as usize) {
            let k = digit_at(rep, j);
            let term = rep.alphabet[k].mul(&beta.pow(rep.l_shift - j as i64)?);
            int_part = int_part.add(&term);
        }
    }
    let frac = total.sub(&int_part);
    Ok((int_part, frac))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn setup(coeffs: &[i64], alphabet: &[(i64, i64)]) -> (PlaceSystem, Vec<FieldElement>) {
        let f = NumberField::new(IntPoly::from_i64(coeffs), PrecCtx::default()).unwrap();
        let ps = PlaceSystem::new(f.clone(), PrecCtx::default()).unwrap();
        let alpha: Vec<FieldElement> = alphabet
            .iter()
            .map(|&(n, d)| f.from_rational(r(n, d)))
            .collect();
        (ps, alpha)
    }

    #[test]
    fn binary_three() {
        // at state 1 the shifted value 2*1 - 1 = 1 is excluded from the
        // half-open window, so the expansion terminates in zeros: 11.000...
        let (ps, alpha) = setup(&[-2, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().from_int(3);
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let rep = represent(&ps, &dom, &x, &Policy::default()).unwrap();
        assert_eq!(rep.l_shift, 2);
        assert_eq!(rep.preperiod, vec![1, 1]);
        assert_eq!(rep.period, vec![0]);
        assert!(verify(&rep, &x).unwrap());
        let (ip, fp) = split_parts(&rep, ps.field()).unwrap();
        assert_eq!(ip.to_rational().unwrap(), r(3, 1));
        assert!(fp.is_zero());
    }

    #[test]
    fn binary_third() {
        let (ps, alpha) = setup(&[-2, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().from_rational(r(1, 3));
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let (rep, trace) = represent_traced(&ps, &dom, &x, &Policy::default()).unwrap();
        assert_eq!(rep.l_shift, 0);
        assert!(rep.preperiod.is_empty());
        assert_eq!(rep.period, vec![0, 1]);
        assert!(verify(&rep, &x).unwrap());
        // every orbit state has denominator dividing 3
        for s in &trace.states {
            assert!((r(3, 1) * s.to_rational().unwrap()).is_integer());
        }
    }

    #[test]
    fn binary_five_thirds_split() {
        let (ps, alpha) = setup(&[-2, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().from_rational(r(5, 3));
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let rep = represent(&ps, &dom, &x, &Policy::default()).unwrap();
        assert!(verify(&rep, &x).unwrap());
        let (ip, fp) = split_parts(&rep, ps.field()).unwrap();
        assert_eq!(ip.to_rational().unwrap(), r(1, 1));
        assert_eq!(fp.to_rational().unwrap(), r(2, 3));
    }

    #[test]
    fn golden_third_is_periodic() {
        let (ps, alpha) = setup(&[-1, -1, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().from_rational(r(1, 3));
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let (rep, trace) = represent_traced(&ps, &dom, &x, &Policy::default()).unwrap();
        assert!(verify(&rep, &x).unwrap());
        assert_eq!(rep.l_shift, 0);
        // cycle closes exactly
        let n = trace.preperiod_len + rep.period.len();
        assert_eq!(trace.states[n], trace.states[trace.preperiod_len]);
        // purely periodic eight-step cycle
        assert!(rep.preperiod.is_empty());
        assert_eq!(rep.period, vec![0, 0, 1, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn golden_integer_three() {
        let (ps, alpha) = setup(&[-1, -1, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().from_int(3);
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let rep = represent(&ps, &dom, &x, &Policy::default()).unwrap();
        assert_eq!(rep.l_shift, 3);
        assert!(verify(&rep, &x).unwrap());
        let (ip, fp) = split_parts(&rep, ps.field()).unwrap();
        assert_eq!(ip.add(&fp), x);
    }

    #[test]
    fn salem_half_cycles_and_verifies() {
        let (ps, alpha) = setup(
            &[1, -1, -1, -1, 1],
            &[(-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1)],
        );
        let x = ps.field().from_rational(r(1, 2));
        let dom = DomainSpec::for_value(&ps, alpha, r(1, 32), &x).unwrap();
        let rep = represent(&ps, &dom, &x, &Policy::default()).unwrap();
        assert!(verify(&rep, &x).unwrap());
        assert!(!rep.period.is_empty());
    }

    #[test]
    fn rational_base_needs_matching_denominators() {
        // 3/2 with integer digits strands odd 2-adic states
        let (ps, alpha) = setup(&[-3, 2], &[(0, 1), (1, 1), (2, 1)]);
        let x = ps.field().from_int(2);
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let mut pol = Policy::default();
        pol.mode = Mode::Guaranteed;
        match represent(&ps, &dom, &x, &pol) {
            Err(CoreError::NoAdmissibleDigit { .. }) => {}
            other => panic!("expected NoAdmissibleDigit, got {:?}", other),
        }
    }

    #[test]
    fn rational_base_with_half_integer_digits() {
        let (ps, alpha) = setup(
            &[-3, 2],
            &[(0, 1), (1, 2), (1, 1), (3, 2), (2, 1)],
        );
        let x = ps.field().from_int(2);
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let mut pol = Policy::default();
        pol.mode = Mode::Guaranteed;
        let rep = represent(&ps, &dom, &x, &pol).unwrap();
        assert!(verify(&rep, &x).unwrap());
        assert_eq!(rep.l_shift, 2);
        // 2 = beta + 1/2: stream 1, 1/2, then zeros
        assert_eq!(rep.preperiod, vec![2, 1]);
        assert_eq!(rep.period, vec![0]);
    }

    #[test]
    fn iteration_cap_honoured() {
        let (ps, alpha) = setup(&[-1, -1, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().from_rational(r(1, 97));
        let dom = DomainSpec::for_value(&ps, alpha.clone(), r(0, 1), &x).unwrap();
        let pol = Policy { max_steps: 2, ..Policy::default() };
        match represent(&ps, &dom, &x, &pol) {
            Err(CoreError::IterationCapExceeded { cap }) => assert_eq!(cap, 2),
            Ok(rep) => {
                // only acceptable if the expansion genuinely fits in 2 steps
                assert!(rep.preperiod.len() + rep.period.len() <= 2);
            }
            other => panic!("unexpected: {:?}", other),
        }
    }

    #[test]
    fn value_of_manual_rep() {
        let f = NumberField::new(IntPoly::from_i64(&[-2, 1]), PrecCtx::default()).unwrap();
        let alpha = vec![f.from_int(0), f.from_int(1)];
        let rep = Representation {
            minpoly: f.minpoly().clone(),
            alphabet: alpha,
            l_shift: 2,
            preperiod: vec![1, 1],
            period: vec![0],
        };
        let v = value_of(&rep, &f).unwrap();
        assert_eq!(v.to_rational().unwrap(), r(3, 1));
        let (ip, fp) = split_parts(&rep, &f).unwrap();
        assert_eq!(ip.to_rational().unwrap(), r(3, 1));
        assert!(fp.is_zero());
    }

    #[test]
    fn verify_rejects_wrong_value() {
        let f = NumberField::new(IntPoly::from_i64(&[-2, 1]), PrecCtx::default()).unwrap();
        let alpha = vec![f.from_int(0), f.from_int(1)];
        let rep = Representation {
            minpoly: f.minpoly().clone(),
            alphabet: alpha,
            l_shift: 2,
            preperiod: vec![1, 1],
            period: vec![0],
        };
        assert!(!verify(&rep, &f.from_int(4)).unwrap());
        assert!(verify(&rep, &f.from_int(3)).unwrap());
    }

    #[test]
    fn rep_json_shape() {
        let f = NumberField::new(IntPoly::from_i64(&[-1, -1, 1]), PrecCtx::default()).unwrap();
        let alpha = vec![f.from_int(0), f.from_int(1)];
        let rep = Representation {
            minpoly: f.minpoly().clone(),
            alphabet: alpha,
            l_shift: 3,
            preperiod: vec![1, 0],
            period: vec![1],
        };
        let js = serde_json::to_value(&rep).unwrap();
        assert_eq!(js["minpoly"], serde_json::json!([-1, -1, 1]));
        assert_eq!(js["L"], 3);
        assert_eq!(js["alphabet"][1][0], "1");
        assert_eq!(js["period"], serde_json::json!([1]));
    }

    #[test]
    fn zero_value_fixed_point() {
        let (ps, alpha) = setup(&[-1, -1, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().zero();
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let rep = represent(&ps, &dom, &x, &Policy::default()).unwrap();
        assert_eq!(rep.preperiod.len(), 0);
        assert_eq!(rep.period, vec![0]);
        assert!(verify(&rep, &x).unwrap());
    }

    #[test]
    fn guaranteed_mode_golden() {
        let (ps, alpha) = setup(&[-1, -1, 1], &[(0, 1), (1, 1)]);
        let x = ps.field().from_rational(r(1, 3));
        let dom = DomainSpec::for_value(&ps, alpha, r(0, 1), &x).unwrap();
        let pol = Policy { mode: Mode::Guaranteed, ..Policy::default() };
        let rep = represent(&ps, &dom, &x, &pol).unwrap();
        assert!(verify(&rep, &x).unwrap());
    }
}
