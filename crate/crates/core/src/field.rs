//! Exact arithmetic in Q(beta).
//!
//! A field is built from the integer minimal polynomial of beta,
//! constant-first. Degree >= 2 requires a monic irreducible polynomial and
//! elements are coefficient vectors over the power basis 1, beta, ...,
//! beta^{d-1}. Degree 1 covers rational bases s/t (minimal polynomial
//! t*x - s) and elements collapse to plain rationals.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::ball::PrecCtx;
use crate::error::{CoreError, Result};
use crate::poly::{IntPoly, QPoly};
use crate::roots::{prove_irreducible, IrredProof};

pub type Rational = BigRational;

#[derive(Debug)]
struct FieldInner {
    minpoly: IntPoly,
    degree: usize,
    irred: IrredProof,
    /// beta^k for k in d..=2d-2 expressed over the power basis; used to fold
    /// products back into degree < d.
    high_powers: Vec<Vec<BigRational>>,
}

/// The field Q(beta) for a fixed defining polynomial. Cheap to clone.
#[derive(Clone, Debug)]
pub struct NumberField(Arc<FieldInner>);

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.minpoly == other.0.minpoly
    }
}
impl Eq for NumberField {}

impl NumberField {
    /// Build the field. Degree 1 accepts any leading coefficient (rational
    /// base); degree >= 2 must be monic and irreducibility is proved or the
    /// construction fails with a factor witness.
    pub fn new(minpoly: IntPoly, prec: PrecCtx) -> Result<NumberField> {
        let d = minpoly.degree();
        if d == 0 {
            return Err(CoreError::Invalid("defining polynomial must be nonconstant".into()));
        }
        let irred = if d == 1 {
            IrredProof::Degree1
        } else {
            if !minpoly.is_monic() {
                return Err(CoreError::NotMonic {
                    degree: d,
                    leading: minpoly.leading().clone(),
                });
            }
            prove_irreducible(&minpoly, prec)?
        };
        // primitivity for degree 1: gcd(s, t) = 1 keeps the label honest
        if d == 1 {
            let g = minpoly.coeffs[0].gcd(&minpoly.coeffs[1]);
            if !g.is_one() {
                return Err(CoreError::Invalid(
                    "degree-1 defining polynomial must be primitive".into(),
                ));
            }
            if minpoly.coeffs[1].is_negative() {
                return Err(CoreError::Invalid(
                    "degree-1 defining polynomial must have positive leading coefficient".into(),
                ));
            }
        }
        let mut high_powers = Vec::new();
        if d >= 2 {
            // beta^d = -(c_0 + c_1 beta + ... + c_{d-1} beta^{d-1})
            let mut cur: Vec<BigRational> = (0..d)
                .map(|i| -BigRational::from_integer(minpoly.coeffs[i].clone()))
                .collect();
            high_powers.push(cur.clone());
            for _ in (d + 1)..=(2 * d - 2) {
                // multiply by beta: shift, fold the overflow through beta^d
                let top = cur[d - 1].clone();
                let mut next = vec![BigRational::zero(); d];
                for i in 1..d {
                    next[i] = cur[i - 1].clone();
                }
                for i in 0..d {
                    next[i] += &top * &high_powers[0][i];
                }
                cur = next;
                high_powers.push(cur.clone());
            }
        }
        Ok(NumberField(Arc::new(FieldInner { minpoly, degree: d, irred, high_powers })))
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.0.minpoly
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn irreducibility(&self) -> &IrredProof {
        &self.0.irred
    }

    pub fn is_rational(&self) -> bool {
        self.0.degree == 1
    }

    /// beta as a rational number, available only in degree 1.
    pub fn beta_rational(&self) -> Option<BigRational> {
        if self.0.degree == 1 {
            Some(-BigRational::new(
                self.0.minpoly.coeffs[0].clone(),
                self.0.minpoly.coeffs[1].clone(),
            ))
        } else {
            None
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_rational(BigRational::zero())
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut coeffs = vec![BigRational::zero(); self.0.degree];
        coeffs[0] = q;
        FieldElement { field: self.clone(), coeffs }
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn beta(&self) -> FieldElement {
        if self.0.degree == 1 {
            return self.from_rational(self.beta_rational().unwrap());
        }
        let mut coeffs = vec![BigRational::zero(); self.0.degree];
        coeffs[1] = BigRational::one();
        FieldElement { field: self.clone(), coeffs }
    }

    /// Element from basis coefficients (may be shorter than the degree).
    pub fn element(&self, mut coeffs: Vec<BigRational>) -> Result<FieldElement> {
        if coeffs.len() > self.0.degree {
            return Err(CoreError::Invalid(format!(
                "{} coefficients for a degree {} field",
                coeffs.len(),
                self.0.degree
            )));
        }
        coeffs.resize(self.0.degree, BigRational::zero());
        Ok(FieldElement { field: self.clone(), coeffs })
    }

    /// Reduce an arbitrary-degree coefficient vector modulo the defining
    /// polynomial.
    pub fn reduce_poly(&self, coeffs: Vec<BigRational>) -> FieldElement {
        let d = self.0.degree;
        if d == 1 {
            // evaluate at the rational beta
            let b = self.beta_rational().unwrap();
            let mut acc = BigRational::zero();
            for c in coeffs.iter().rev() {
                acc = acc * &b + c;
            }
            return self.from_rational(acc);
        }
        let mut out = vec![BigRational::zero(); d];
        for (k, c) in coeffs.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k < d {
                out[k] += c;
            } else {
                let hp = &self.0.high_powers[k - d];
                for i in 0..d {
                    out[i] += &c * &hp[i];
                }
            }
        }
        FieldElement { field: self.clone(), coeffs: out }
    }
}

/// An element of Q(beta) over the power basis, always reduced.
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: NumberField,
    coeffs: Vec<BigRational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for c in &self.coeffs {
            c.hash(state);
        }
    }
}

impl FieldElement {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(CoreError::FieldMismatch)
        }
    }

    fn assert_field(&self, other: &FieldElement) {
        assert!(
            self.field == other.field,
            "field mismatch: {} vs {}",
            self.field.minpoly(),
            other.field.minpoly()
        );
    }

    pub fn add(&self, o: &FieldElement) -> FieldElement {
        self.assert_field(o);
        FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &FieldElement) -> FieldElement {
        self.assert_field(o);
        FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul(&self, o: &FieldElement) -> FieldElement {
        self.assert_field(o);
        let d = self.field.degree();
        if d == 1 {
            return self
                .field
                .from_rational(&self.coeffs[0] * &o.coeffs[0]);
        }
        let mut conv = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] += a * b;
                }
            }
        }
        self.field.reduce_poly(conv)
    }

    /// Multiplication by beta; the common inner-loop case.
    pub fn mul_beta(&self) -> FieldElement {
        let d = self.field.degree();
        if d == 1 {
            let b = self.field.beta_rational().unwrap();
            return self.field.from_rational(&self.coeffs[0] * b);
        }
        let top = self.coeffs[d - 1].clone();
        let mut out = vec![BigRational::zero(); d];
        for i in 1..d {
            out[i] = self.coeffs[i - 1].clone();
        }
        if !top.is_zero() {
            let hp = &self.field.0.high_powers[0];
            for i in 0..d {
                out[i] += &top * &hp[i];
            }
        }
        FieldElement { field: self.field.clone(), coeffs: out }
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let d = self.field.degree();
        if d == 1 {
            return Ok(self
                .field
                .from_rational(BigRational::one() / &self.coeffs[0]));
        }
        let e = QPoly::new(self.coeffs.clone());
        let m = self.field.minpoly().to_qpoly();
        let (g, u, _) = e.ext_gcd(&m);
        debug_assert_eq!(g.degree(), 0, "defining polynomial is irreducible");
        let ginv = BigRational::one() / g.coeffs[0].clone();
        let mut coeffs = u.coeffs;
        for c in coeffs.iter_mut() {
            *c *= &ginv;
        }
        Ok(self.field.reduce_poly(coeffs))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(&o.inverse()?))
    }

    pub fn pow(&self, n: i64) -> Result<FieldElement> {
        if n < 0 {
            return self.inverse()?.pow(-n);
        }
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Rational value when the element lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// lcm of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        l
    }

    /// Matrix of multiplication by self over the power basis, column-major:
    /// column j holds the coefficients of self * beta^j.
    fn mult_matrix(&self) -> Vec<Vec<BigRational>> {
        let d = self.field.degree();
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        for j in 0..d {
            cols.push(cur.coeffs.clone());
            if j + 1 < d {
                cur = cur.mul_beta();
            }
        }
        cols
    }

    /// Field trace: trace of the multiplication-by-self matrix.
    pub fn trace(&self) -> BigRational {
        let d = self.field.degree();
        if d == 1 {
            return self.coeffs[0].clone();
        }
        let cols = self.mult_matrix();
        let mut t = BigRational::zero();
        for (j, col) in cols.iter().enumerate() {
            t += &col[j];
        }
        t
    }

    /// Field norm: determinant of the multiplication-by-self matrix.
    pub fn norm(&self) -> BigRational {
        let d = self.field.degree();
        if d == 1 {
            return self.coeffs[0].clone();
        }
        let cols = self.mult_matrix();
        // column-major to row-major dense matrix, then fraction-free-ish
        // gaussian elimination over Q
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect();
        let mut det = BigRational::one();
        for k in 0..d {
            let piv = (k..d).find(|&i| !m[i][k].is_zero());
            let piv = match piv {
                Some(p) => p,
                None => return BigRational::zero(),
            };
            if piv != k {
                m.swap(piv, k);
                det = -det;
            }
            det *= &m[k][k];
            let inv = BigRational::one() / &m[k][k];
            for i in (k + 1)..d {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] * &inv;
                for j in k..d {
                    let sub = &f * &m[k][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        det
    }

    /// Coefficients as `p/q` strings, the interchange form.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FieldElement", 1)?;
        st.serialize_field("coeffs", &self.coeff_strings())?;
        st.end()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*b", c)?,
                _ => write!(f, "{}*b^{}", c, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
