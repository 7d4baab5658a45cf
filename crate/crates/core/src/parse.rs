//! Input forms accepted on the command line: polynomials written in x,
//! rationals (fraction, integer or decimal literal), field elements given by
//! coefficient vectors, digit alphabets as integer ranges or JSON, and the
//! JSON round-trip for stored representations.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::ball::PrecCtx;
use crate::engine::Representation;
use crate::error::{CoreError, Result};
use crate::field::{FieldElement, NumberField, Rational};
use crate::poly::IntPoly;

fn invalid(msg: impl Into<String>) -> CoreError {
    CoreError::Invalid(msg.into())
}

/// Parse an integer polynomial, either written out like "x^4-x^3-x^2-x+1"
/// or "2x-3", or as a JSON array of coefficients, constant first.
pub fn parse_minpoly(s: &str) -> Result<IntPoly> {
    let t = s.trim();
    if t.is_empty() {
        return Err(invalid("empty polynomial"));
    }
    if t.starts_with('[') {
        let v: Value = serde_json::from_str(t)
            .map_err(|e| invalid(format!("bad JSON polynomial: {}", e)))?;
        return int_poly_from_json(&v);
    }
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for c in compact.chars() {
        if (c == '+' || c == '-') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);

    let mut coeffs: Vec<BigInt> = Vec::new();
    for term in &terms {
        let (coeff, exp) = parse_term(term)?;
        if exp >= coeffs.len() {
            coeffs.resize(exp + 1, BigInt::zero());
        }
        coeffs[exp] += coeff;
    }
    let p = IntPoly::new(coeffs);
    if p.is_zero() {
        return Err(invalid("polynomial is zero"));
    }
    Ok(p)
}

/// One signed monomial: `coefficient`, `x`, `x^k`, `c*x^k` or `cx^k`.
fn parse_term(term: &str) -> Result<(BigInt, usize)> {
    let (sign, body) = match term.strip_prefix('-') {
        Some(b) => (-1, b),
        None => (1, term.strip_prefix('+').unwrap_or(term)),
    };
    if body.is_empty() {
        return Err(invalid(format!("dangling sign in term {:?}", term)));
    }
    let bad = || invalid(format!("cannot read term {:?}", term));
    let (coeff, exp) = match body.find('x') {
        Some(pos) => {
            let head = body[..pos].trim_end_matches('*');
            let coeff = if head.is_empty() {
                BigInt::one()
            } else {
                head.parse::<BigInt>().map_err(|_| bad())?
            };
            let tail = &body[pos + 1..];
            let exp = if tail.is_empty() {
                1usize
            } else {
                tail.strip_prefix('^')
                    .and_then(|e| e.parse::<usize>().ok())
                    .ok_or_else(bad)?
            };
            (coeff, exp)
        }
        None => (body.parse::<BigInt>().map_err(|_| bad())?, 0),
    };
    if exp > 512 {
        return Err(invalid(format!("exponent {} out of range", exp)));
    }
    Ok((BigInt::from(sign) * coeff, exp))
}

fn int_poly_from_json(v: &Value) -> Result<IntPoly> {
    serde_json::from_value::<IntPoly>(v.clone())
        .map_err(|e| invalid(format!("bad polynomial coefficients: {}", e)))
}

/// Parse "p/q", an integer, or a decimal literal like "0.3" (kept exact).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num = n.trim().parse::<BigInt>().map_err(|_| invalid(format!("bad numerator {:?}", n)))?;
        let den = d.trim().parse::<BigInt>().map_err(|_| invalid(format!("bad denominator {:?}", d)))?;
        if den.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac)) = t.split_once('.') {
        let (neg, ip) = match int_part.trim().strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.trim().strip_prefix('+').unwrap_or(int_part.trim())),
        };
        let digits = format!("{}{}", ip, frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(invalid(format!("bad decimal literal {:?}", t)));
        }
        let num = digits.parse::<BigInt>().expect("digits only");
        let mut den = BigInt::one();
        for _ in 0..frac.len() {
            den *= 10;
        }
        return Ok(Rational::new(if neg { -num } else { num }, den));
    }
    t.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| invalid(format!("bad rational {:?}", t)))
}

/// A field element: a rational, or a JSON array of rational coefficients in
/// ascending powers of beta.
pub fn parse_element(field: &NumberField, s: &str) -> Result<FieldElement> {
    let t = s.trim();
    if t.starts_with('[') {
        let v: Value =
            serde_json::from_str(t).map_err(|e| invalid(format!("bad JSON element: {}", e)))?;
        return element_from_json(field, &v);
    }
    Ok(field.from_rational(parse_rational(t)?))
}

fn json_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(BigInt::from(i)))
            .ok_or_else(|| invalid("numeric coefficients must be integers; quote rationals")),
        Value::String(s) => parse_rational(s),
        _ => Err(invalid("coefficient must be an integer or a rational string")),
    }
}

/// Coefficient array -> field element, shorter vectors padded with zeros.
pub fn element_from_json(field: &NumberField, v: &Value) -> Result<FieldElement> {
    let arr = v
        .as_array()
        .ok_or_else(|| invalid("element must be a JSON array of coefficients"))?;
    let coeffs = arr.iter().map(json_rational).collect::<Result<Vec<_>>>()?;
    field.element(coeffs)
}

/// A digit set: an inclusive integer range "lo..hi" or inline JSON (the CLI
/// resolves file arguments before calling this).
pub fn parse_alphabet(field: &NumberField, s: &str) -> Result<Vec<FieldElement>> {
    let t = s.trim();
    if t.starts_with('[') || t.starts_with('{') {
        let v: Value =
            serde_json::from_str(t).map_err(|e| invalid(format!("bad JSON alphabet: {}", e)))?;
        return alphabet_from_json(field, &v);
    }
    if let Some((lo, hi)) = t.split_once("..") {
        let lo = lo.trim().parse::<i64>().map_err(|_| invalid(format!("bad range start {:?}", lo)))?;
        let hi = hi.trim().parse::<i64>().map_err(|_| invalid(format!("bad range end {:?}", hi)))?;
        if lo > hi {
            return Err(invalid(format!("empty range {}..{}", lo, hi)));
        }
        if hi.saturating_sub(lo) > 4096 {
            return Err(invalid("alphabet range too large"));
        }
        return Ok((lo..=hi).map(|k| field.from_int(k)).collect());
    }
    Err(invalid("alphabet must be a lo..hi integer range or JSON"))
}

/// JSON digit sets: a bare array of entries (integer, rational string, or
/// coefficient array), or an object with a `digits` field as emitted by the
/// alphabet command.
pub fn alphabet_from_json(field: &NumberField, v: &Value) -> Result<Vec<FieldElement>> {
    let arr = match v {
        Value::Array(a) => a,
        Value::Object(m) => m
            .get("digits")
            .and_then(Value::as_array)
            .ok_or_else(|| invalid("alphabet object needs a digits array"))?,
        _ => return Err(invalid("alphabet must be a JSON array or object")),
    };
    let mut out = Vec::with_capacity(arr.len());
    for d in arr {
        let e = match d {
            Value::Object(m) => {
                let c = m
                    .get("coeffs")
                    .ok_or_else(|| invalid("digit object needs a coeffs array"))?;
                element_from_json(field, c)?
            }
            Value::Array(_) => element_from_json(field, d)?,
            Value::Number(_) | Value::String(_) => field.from_rational(json_rational(d)?),
            _ => return Err(invalid("unsupported digit entry")),
        };
        out.push(e);
    }
    if out.is_empty() {
        return Err(invalid("alphabet is empty"));
    }
    Ok(out)
}

/// Rebuild a representation from its JSON form, reconstructing the field
/// from the stored minimal polynomial.
pub fn representation_from_json(
    v: &Value,
    prec: PrecCtx,
) -> Result<(NumberField, Representation)> {
    let minpoly = int_poly_from_json(
        v.get("minpoly").ok_or_else(|| invalid("representation needs a minpoly"))?,
    )?;
    let field = NumberField::new(minpoly, prec)?;
    let alphabet = alphabet_from_json(
        &field,
        v.get("alphabet").ok_or_else(|| invalid("representation needs an alphabet"))?,
    )?;
    let l_shift = v
        .get("L")
        .and_then(Value::as_i64)
        .ok_or_else(|| invalid("representation needs an integer L"))?;
    let digit_list = |key: &str| -> Result<Vec<usize>> {
        let arr = v
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| invalid(format!("representation needs a {} array", key)))?;
        arr.iter()
            .map(|d| {
                d.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| invalid(format!("bad digit index in {}", key)))
            })
            .collect()
    };
    let preperiod = digit_list("preperiod")?;
    let period = digit_list("period")?;
    let rep = Representation {
        minpoly: field.minpoly().clone(),
        alphabet,
        l_shift,
        preperiod,
        period,
    };
    Ok((field, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::Alphabet;
    use crate::engine::{represent, verify, DomainSpec, Policy};
    use crate::places::PlaceSystem;

    #[test]
    fn polynomial_strings() {
        assert_eq!(parse_minpoly("x^4-x^3-x^2-x+1").unwrap(), IntPoly::from_i64(&[1, -1, -1, -1, 1]));
        assert_eq!(parse_minpoly("x-2").unwrap(), IntPoly::from_i64(&[-2, 1]));
        assert_eq!(parse_minpoly("2x-3").unwrap(), IntPoly::from_i64(&[-3, 2]));
        assert_eq!(parse_minpoly("2*x - 3").unwrap(), IntPoly::from_i64(&[-3, 2]));
        assert_eq!(parse_minpoly("x^2+2x+2").unwrap(), IntPoly::from_i64(&[2, 2, 1]));
        assert_eq!(parse_minpoly(" x^2 - x - 1 ").unwrap(), IntPoly::from_i64(&[-1, -1, 1]));
        assert_eq!(parse_minpoly("x").unwrap(), IntPoly::from_i64(&[0, 1]));
        // like terms accumulate
        assert_eq!(parse_minpoly("x^2+x^2-2").unwrap(), IntPoly::from_i64(&[-2, 0, 2]));
    }

    #[test]
    fn polynomial_json() {
        assert_eq!(parse_minpoly("[-1,-1,1]").unwrap(), IntPoly::from_i64(&[-1, -1, 1]));
        assert_eq!(parse_minpoly("[\"-1\", -1, 1]").unwrap(), IntPoly::from_i64(&[-1, -1, 1]));
    }

    #[test]
    fn polynomial_rejects_garbage() {
        assert!(parse_minpoly("").is_err());
        assert!(parse_minpoly("y+1").is_err());
        assert!(parse_minpoly("x^").is_err());
        assert!(parse_minpoly("x^-2").is_err());
        assert!(parse_minpoly("0").is_err());
        assert!(parse_minpoly("x^1000").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/7").unwrap(), Rational::new(1.into(), 7.into()));
        assert_eq!(parse_rational("-3").unwrap(), Rational::from_integer((-3).into()));
        assert_eq!(parse_rational("0.3").unwrap(), Rational::new(3.into(), 10.into()));
        assert_eq!(parse_rational("2.50").unwrap(), Rational::new(5.into(), 2.into()));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::new((-1).into(), 4.into()));
        assert_eq!(parse_rational(" 4/6 ").unwrap(), Rational::new(2.into(), 3.into()));
        assert!(matches!(parse_rational("1/0"), Err(CoreError::DivisionByZero)));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    fn golden() -> NumberField {
        NumberField::new(IntPoly::from_i64(&[-1, -1, 1]), PrecCtx::default()).unwrap()
    }

    #[test]
    fn elements_and_alphabets() {
        let f = golden();
        let phi = f.beta();
        assert_eq!(parse_element(&f, "[0, 1]").unwrap(), phi);
        assert_eq!(parse_element(&f, "[\"1/2\"]").unwrap(), f.from_rational(Rational::new(1.into(), 2.into())));
        assert_eq!(parse_element(&f, "3/4").unwrap(), f.from_rational(Rational::new(3.into(), 4.into())));

        let a = parse_alphabet(&f, "0..1").unwrap();
        assert_eq!(a, vec![f.from_int(0), f.from_int(1)]);
        let b = parse_alphabet(&f, "-2..2").unwrap();
        assert_eq!(b.len(), 5);
        let c = parse_alphabet(&f, "[-1, \"0\", [0, 1]]").unwrap();
        assert_eq!(c, vec![f.from_int(-1), f.from_int(0), phi]);
        assert!(parse_alphabet(&f, "2..1").is_err());
        assert!(parse_alphabet(&f, "fish").is_err());
    }

    #[test]
    fn alphabet_object_round_trip() {
        let f = golden();
        let alpha = Alphabet::integer_range(&f, 2);
        let v = serde_json::to_value(&alpha).unwrap();
        let digits = alphabet_from_json(&f, &v).unwrap();
        assert_eq!(digits, alpha.digits);
    }

    #[test]
    fn representation_round_trip() {
        let field = NumberField::new(IntPoly::from_i64(&[-2, 1]), PrecCtx::default()).unwrap();
        let ps = PlaceSystem::new(field, PrecCtx::default()).unwrap();
        let third = ps.field().from_rational(Rational::new(1.into(), 3.into()));
        let dom = DomainSpec::for_value(
            &ps,
            vec![ps.field().from_int(0), ps.field().from_int(1)],
            Rational::zero(),
            &third,
        )
        .unwrap();
        let rep = represent(&ps, &dom, &third, &Policy::default()).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        let (field2, rep2) = representation_from_json(&v, PrecCtx::default()).unwrap();
        assert_eq!(rep2, rep);
        let third2 = field2.from_rational(Rational::new(1.into(), 3.into()));
        assert!(verify(&rep2, &third2).unwrap());
    }
}
