//! Integer and rational polynomials, constant coefficient first.
//!
//! Provides the small amount of polynomial algebra the rest of the crate
//! needs: euclidean division and gcd over Q, Sturm chains for exact real root
//! counting, the reciprocal test, and the substitution t = x + 1/x that turns
//! palindromic polynomials into half-degree ones (used to count roots on the
//! unit circle exactly).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dense integer polynomial; `coeffs[i]` multiplies x^i, last entry nonzero
/// unless the polynomial is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    pub coeffs: Vec<BigInt>,
}

// On the wire a polynomial is a plain array of integers, constant first;
// coefficients beyond i64 travel as decimal strings.
impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IntPoly;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of integers (or integer strings)")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<IntPoly, A::Error> {
                #[derive(Deserialize)]
                #[serde(untagged)]
                enum Coeff {
                    Int(i64),
                    Str(String),
                }
                let mut coeffs = Vec::new();
                while let Some(c) = seq.next_element::<Coeff>()? {
                    coeffs.push(match c {
                        Coeff::Int(v) => BigInt::from(v),
                        Coeff::Str(s) => s
                            .parse::<BigInt>()
                            .map_err(|e| de::Error::custom(format!("bad coefficient: {}", e)))?,
                    });
                }
                Ok(IntPoly::new(coeffs))
            }
        }
        d.deserialize_seq(V)
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly::new(vec![BigInt::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval_q(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_i(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        if self.degree() == 0 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// m(-x), with the sign normalised so the leading coefficient is positive
    /// when comparing against m for root symmetry detection.
    pub fn substitute_neg(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// x^deg * m(1/x): coefficients reversed.
    pub fn reciprocal(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    /// Self-reciprocal (palindromic) polynomials are the only irreducible
    /// monic integer polynomials of degree >= 2 that can have roots on the
    /// unit circle.
    pub fn is_self_reciprocal(&self) -> bool {
        *self == self.reciprocal()
    }

    /// For a palindromic polynomial of even degree 2k, the polynomial q with
    /// m(x) = x^k q(x + 1/x). Built from v_j = x^j + x^-j via the recurrence
    /// p_0 = 2, p_1 = t, p_{j+1} = t p_j - p_{j-1}.
    pub fn halved_on_circle(&self) -> Option<IntPoly> {
        if !self.is_self_reciprocal() || self.degree() % 2 != 0 || self.degree() == 0 {
            return None;
        }
        let k = self.degree() / 2;
        let mut q = IntPoly::new(vec![self.coeffs[k].clone()]);
        let mut p_prev = IntPoly::from_i64(&[2]); // p_0
        let mut p_cur = IntPoly::from_i64(&[0, 1]); // p_1 = t
        for j in 1..=k {
            q = q.add(&p_cur.scale_int(&self.coeffs[k + j]));
            let next = p_cur.mul(&IntPoly::from_i64(&[0, 1])).sub(&p_prev);
            p_prev = p_cur;
            p_cur = next;
        }
        Some(q)
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        IntPoly::new(out)
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale_int(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact division test; returns the quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.to_qpoly().div_rem(&d.to_qpoly());
        if !r.is_zero() {
            return None;
        }
        let mut out = Vec::with_capacity(q.coeffs.len());
        for c in &q.coeffs {
            if !c.denom().is_one() {
                return None;
            }
            out.push(c.numer().clone());
        }
        Some(IntPoly::new(out))
    }

    /// 1 + max |a_i| / |lead|: every complex root has modulus below this.
    pub fn cauchy_root_bound(&self) -> BigRational {
        let lead = BigRational::from_integer(self.leading().abs());
        let mut m = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let a = BigRational::from_integer(c.abs());
            if a > m {
                m = a;
            }
        }
        BigRational::one() + m / lead
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{}", mag)?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{}", i)?,
            }
        }
        Ok(())
    }
}

/// Dense rational polynomial, same conventions as `IntPoly`.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly {
    pub coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly::new(vec![BigRational::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.degree() == 0 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        QPoly::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Euclidean division: self = q*d + r with deg r < deg d.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = d.degree();
        if self.degree() < dd || self.is_zero() {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        let lead = d.leading().clone();
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let f = &rem[i] / &lead;
            quot[i - dd] = f.clone();
            for (j, c) in d.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = &rem[idx] - &f * c;
            }
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Monic gcd via the euclidean algorithm.
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().clone();
        a.scale(&(BigRational::one() / lead))
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    /// Extended euclidean algorithm: returns (g, u, v) with u*self + v*o = g
    /// and g the monic gcd.
    pub fn ext_gcd(&self, o: &QPoly) -> (QPoly, QPoly, QPoly) {
        let mut r0 = self.clone();
        let mut r1 = o.clone();
        let mut u0 = QPoly::new(vec![BigRational::one()]);
        let mut u1 = QPoly::zero();
        let mut v0 = QPoly::zero();
        let mut v1 = QPoly::new(vec![BigRational::one()]);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let nu = u0.sub(&q.mul(&u1));
            let nv = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = nu;
            v0 = v1;
            v1 = nv;
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let inv = BigRational::one() / r0.leading().clone();
        (r0.scale(&inv), u0.scale(&inv), v0.scale(&inv))
    }

    /// Sturm chain: p, p', then negated remainders.
    pub fn sturm_chain(&self) -> Vec<QPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-BigRational::one()));
        }
        chain
    }

    fn sign_variations<F: Fn(&QPoly) -> i8>(chain: &[QPoly], sign_of: F) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in chain {
            let s = sign_of(p);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    /// Requires a squarefree polynomial for exact semantics at b.
    pub fn count_real_roots_between(chain: &[QPoly], a: &BigRational, b: &BigRational) -> usize {
        let va = Self::sign_variations(chain, |p| rational_sign(&p.eval(a)));
        let vb = Self::sign_variations(chain, |p| rational_sign(&p.eval(b)));
        va.saturating_sub(vb)
    }

    /// Total number of distinct real roots.
    pub fn count_real_roots(chain: &[QPoly]) -> usize {
        // signs at -inf / +inf from leading terms
        let v_neg = Self::sign_variations(chain, |p| {
            let s = rational_sign(p.leading());
            if p.degree() % 2 == 0 {
                s
            } else {
                -s
            }
        });
        let v_pos = Self::sign_variations(chain, |p| rational_sign(p.leading()));
        v_neg.saturating_sub(v_pos)
    }
}

pub fn rational_sign(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn display_matches_expected_forms() {
        assert_eq!(IntPoly::from_i64(&[-1, -1, 1]).to_string(), "x^2 - x - 1");
        assert_eq!(IntPoly::from_i64(&[-1, 1]).to_string(), "x - 1");
        assert_eq!(IntPoly::from_i64(&[2, 2, 1]).to_string(), "x^2 + 2x + 2");
        assert_eq!(IntPoly::from_i64(&[-3, 2]).to_string(), "2x - 3");
    }

    #[test]
    fn reciprocal_and_palindrome() {
        let salem = IntPoly::from_i64(&[1, -1, -1, -1, 1]);
        assert!(salem.is_self_reciprocal());
        assert!(!IntPoly::from_i64(&[-1, -1, 1]).is_self_reciprocal());
        let lehmer = IntPoly::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert!(lehmer.is_self_reciprocal());
    }

    #[test]
    fn halved_polynomial_of_salem_quartic() {
        // x^4 - x^3 - x^2 - x + 1 = x^2 q(x + 1/x) with q(t) = t^2 - t - 3
        let salem = IntPoly::from_i64(&[1, -1, -1, -1, 1]);
        let q = salem.halved_on_circle().unwrap();
        assert_eq!(q, IntPoly::from_i64(&[-3, -1, 1]));
    }

    #[test]
    fn sturm_counts_roots_of_quadratics() {
        let p = IntPoly::from_i64(&[-1, -1, 1]).to_qpoly(); // golden ratio
        let chain = p.sturm_chain();
        assert_eq!(QPoly::count_real_roots(&chain), 2);
        assert_eq!(
            QPoly::count_real_roots_between(&chain, &rat(1, 1), &rat(2, 1)),
            1
        );
        let none = IntPoly::from_i64(&[1, 0, 1]).to_qpoly(); // x^2 + 1
        assert_eq!(QPoly::count_real_roots(&none.sturm_chain()), 0);
    }

    #[test]
    fn sturm_counts_lehmer_trace_roots_in_window() {
        // Lehmer's polynomial has 8 unit-circle roots, so its halved
        // polynomial has 4 real roots in (-2, 2).
        let lehmer = IntPoly::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let q = lehmer.halved_on_circle().unwrap();
        assert_eq!(q.degree(), 5);
        let chain = q.to_qpoly().sturm_chain();
        assert_eq!(
            QPoly::count_real_roots_between(&chain, &rat(-2, 1), &rat(2, 1)),
            4
        );
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = IntPoly::from_i64(&[2, 0, -3, 1]).to_qpoly();
        let b = IntPoly::from_i64(&[-1, 1]).to_qpoly();
        let (q, r) = a.div_rem(&b);
        let back = QPoly::new(
            q.coeffs
                .iter()
                .map(|c| c.clone())
                .collect::<Vec<_>>(),
        );
        // a = q*b + r
        let mut check = vec![BigRational::zero(); a.coeffs.len()];
        for (i, qc) in back.coeffs.iter().enumerate() {
            for (j, bc) in b.coeffs.iter().enumerate() {
                check[i + j] = &check[i + j] + qc * bc;
            }
        }
        for (i, rc) in r.coeffs.iter().enumerate() {
            check[i] = &check[i] + rc;
        }
        assert_eq!(QPoly::new(check), a);
    }

    #[test]
    fn div_exact_detects_factors() {
        let p = IntPoly::from_i64(&[-1, 0, 1]); // x^2 - 1
        let f = IntPoly::from_i64(&[-1, 1]);
        assert_eq!(p.div_exact(&f).unwrap(), IntPoly::from_i64(&[1, 1]));
        assert!(p.div_exact(&IntPoly::from_i64(&[1, 1, 1])).is_none());
    }

    #[test]
    fn cauchy_bound_dominates_roots() {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let b = p.cauchy_root_bound();
        // golden ratio 1.618 < 2
        assert!(b >= rat(2, 1));
    }
}
