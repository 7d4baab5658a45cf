//! Complex ball arithmetic over exact rationals with outward rounding.
//!
//! A `Ball` is a closed disk: exact rational center, exact rational radius.
//! All operations are exact on centers and over-approximate on radii, then
//! `round` snaps the center to a dyadic grid (folding the displacement into
//! the radius) so that coefficient growth stays bounded by the working
//! precision. Every derived bound is therefore certified: the true value of
//! an expression lies inside the ball returned for it.

use num_bigint::BigInt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Precision ladder bounds, in bits of dyadic resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecCtx {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecCtx {
    fn default() -> Self {
        PrecCtx { start_bits: 64, max_bits: 4096 }
    }
}

impl PrecCtx {
    pub fn new(start_bits: u32, max_bits: u32) -> Self {
        PrecCtx { start_bits, max_bits: max_bits.max(start_bits) }
    }

    /// Doubling ladder from `start_bits` up to and including `max_bits`.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let (start, max) = (self.start_bits.max(8), self.max_bits);
        std::iter::successors(Some(start), move |&b| {
            if b >= max {
                None
            } else {
                Some((b.saturating_mul(2)).min(max))
            }
        })
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// 2^-bits as a rational.
pub fn ulp(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), pow2(bits))
}

/// Nearest dyadic with denominator 2^bits. The rounding error is < 2^-bits.
pub fn dyadic_round(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(pow2(bits));
    BigRational::new(scaled.round().to_integer(), pow2(bits))
}

/// Smallest dyadic with denominator 2^bits that is >= q.
pub fn dyadic_round_up(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(pow2(bits));
    BigRational::new(scaled.ceil().to_integer(), pow2(bits))
}

/// Certified upper bound on sqrt(q) for q >= 0, within 2^-bits of the truth.
pub fn sqrt_ub(q: &BigRational, bits: u32) -> BigRational {
    debug_assert!(!q.is_negative());
    if q.is_zero() {
        return BigRational::zero();
    }
    let scaled = q * BigRational::from_integer(pow2(2 * bits));
    // ceil(scaled) >= q*4^bits, so isqrt(ceil)+1 > sqrt(q)*2^bits.
    let s = scaled.ceil().to_integer().sqrt() + 1;
    BigRational::new(s, pow2(bits))
}

/// Certified lower bound on sqrt(q) for q >= 0.
pub fn sqrt_lb(q: &BigRational, bits: u32) -> BigRational {
    debug_assert!(!q.is_negative());
    if q.is_negative() || q.is_zero() {
        return BigRational::zero();
    }
    let scaled = q * BigRational::from_integer(pow2(2 * bits));
    let s = scaled.floor().to_integer().sqrt();
    BigRational::new(s, pow2(bits))
}

/// Closed complex disk with exact rational center and radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub re: BigRational,
    pub im: BigRational,
    pub rad: BigRational,
}

impl Ball {
    pub fn exact(re: BigRational, im: BigRational) -> Self {
        Ball { re, im, rad: BigRational::zero() }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Ball::exact(q.clone(), BigRational::zero())
    }

    pub fn zero() -> Self {
        Ball::exact(BigRational::zero(), BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Center is exactly on the real axis. Real-place values keep this exact,
    /// which is what makes their modulus comparisons decidable.
    pub fn is_real_centered(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &Ball) -> Ball {
        Ball {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            rad: &self.rad + &o.rad,
        }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        Ball {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            rad: &self.rad + &o.rad,
        }
    }

    pub fn neg(&self) -> Ball {
        Ball { re: -self.re.clone(), im: -self.im.clone(), rad: self.rad.clone() }
    }

    pub fn conj(&self) -> Ball {
        Ball { re: self.re.clone(), im: -self.im.clone(), rad: self.rad.clone() }
    }

    /// Scale by an exact rational.
    pub fn scale(&self, q: &BigRational) -> Ball {
        Ball {
            re: &self.re * q,
            im: &self.im * q,
            rad: &self.rad * q.abs(),
        }
    }

    /// |x*y - cx*cy| <= |cx| ry + |cy| rx + rx ry, so the product ball below
    /// contains the product of any members of the factors.
    pub fn mul(&self, o: &Ball, bits: u32) -> Ball {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            BigRational::zero()
        } else {
            self.center_abs_ub(bits) * &o.rad
                + o.center_abs_ub(bits) * &self.rad
                + &self.rad * &o.rad
        };
        Ball { re, im, rad }.round(bits)
    }

    /// Snap the center to the dyadic grid, folding displacement into the
    /// radius; the radius itself is rounded upward. Exact balls with small
    /// representations are left untouched so rational data stays exact.
    pub fn round(&self, bits: u32) -> Ball {
        let budget = pow2(bits + 4);
        if self.rad.is_zero()
            && self.re.denom().magnitude() < budget.magnitude()
            && self.im.denom().magnitude() < budget.magnitude()
        {
            return self.clone();
        }
        let re = dyadic_round(&self.re, bits);
        let im = dyadic_round(&self.im, bits);
        let err = ulp(bits) * BigRational::from_integer(BigInt::from(2));
        let rad = dyadic_round_up(&(&self.rad + err), bits);
        Ball { re, im, rad }
    }

    /// Exact |center|^2.
    pub fn center_abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Certified upper bound on the center modulus.
    pub fn center_abs_ub(&self, bits: u32) -> BigRational {
        if self.im.is_zero() {
            return self.re.abs();
        }
        sqrt_ub(&self.center_abs_sq(), bits)
    }

    /// Certified lower bound on the center modulus.
    pub fn center_abs_lb(&self, bits: u32) -> BigRational {
        if self.im.is_zero() {
            return self.re.abs();
        }
        sqrt_lb(&self.center_abs_sq(), bits)
    }

    /// Certified upper bound on |value| over the whole ball.
    pub fn abs_ub(&self, bits: u32) -> BigRational {
        self.center_abs_ub(bits) + &self.rad
    }

    /// Certified lower bound on |value| over the whole ball.
    pub fn abs_lb(&self, bits: u32) -> BigRational {
        let lb = self.center_abs_lb(bits) - &self.rad;
        if lb.is_negative() {
            BigRational::zero()
        } else {
            lb
        }
    }

    /// Decide `|value| <= r` for every/any member of the ball, comparing
    /// squared magnitudes exactly so that zero-radius balls resolve even on
    /// the boundary. Returns `None` when the ball straddles the circle.
    pub fn cmp_abs_leq(&self, r: &BigRational) -> Option<bool> {
        if r.is_negative() {
            return Some(false);
        }
        let c2 = self.center_abs_sq();
        if self.rad.is_zero() {
            return Some(c2 <= r * r);
        }
        // |v| <= |c| + rad <= r  certified via |c|^2 <= (r - rad)^2.
        let slack = r - &self.rad;
        if !slack.is_negative() && c2 <= &slack * &slack {
            return Some(true);
        }
        // |v| >= |c| - rad > r  certified via |c|^2 > (r + rad)^2.
        let outer = r + &self.rad;
        if c2 > &outer * &outer {
            return Some(false);
        }
        None
    }

    /// Distance bounds between the two ball centers, widened by the radii:
    /// certified (lower, upper) bounds on |x - y| over members.
    pub fn dist_bounds(&self, o: &Ball, bits: u32) -> (BigRational, BigRational) {
        let d = self.sub(o);
        (d.abs_lb(bits), d.abs_ub(bits))
    }

    /// Certified test that the two balls have no point in common.
    pub fn certainly_disjoint(&self, o: &Ball) -> bool {
        let dre = &self.re - &o.re;
        let dim = &self.im - &o.im;
        let d2 = &dre * &dre + &dim * &dim;
        let r = &self.rad + &o.rad;
        d2 > &r * &r
    }

    /// True when every point of `self` lies within `o` (used by refinement
    /// monotonicity checks).
    pub fn contained_in(&self, o: &Ball) -> bool {
        if self.rad > o.rad {
            return false;
        }
        let dre = &self.re - &o.re;
        let dim = &self.im - &o.im;
        let d2 = &dre * &dre + &dim * &dim;
        let slack = &o.rad - &self.rad;
        d2 <= &slack * &slack
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Horner evaluation of a rational-coefficient polynomial at a ball,
/// constant-first coefficient order.
pub fn eval_poly(coeffs: &[BigRational], z: &Ball, bits: u32) -> Ball {
    let mut acc = Ball::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(z, bits);
        acc = acc.add(&Ball::from_rational(c));
    }
    acc.round(bits)
}
