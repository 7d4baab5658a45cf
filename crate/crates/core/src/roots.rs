//! Certified isolation of the complex roots of an integer polynomial.
//!
//! Approximations come from a floating Durand-Kerner pass; each is then
//! polished by Newton iteration in exact dyadic arithmetic and certified with
//! the bound  min_i |z - r_i| <= deg * |p(z)/p'(z)|,  which holds for any z
//! with p'(z) != 0. Once the certified disks are pairwise disjoint and there
//! are deg of them, each contains exactly one root. A disk centered on the
//! real axis then contains a real root (its root's conjugate lies in the same
//! disk), and mirrored off-axis disks hold a conjugate pair, so realness is
//! certified structurally rather than by a floating threshold.
//!
//! Roots on the unit circle are never detected numerically: an irreducible
//! monic polynomial of degree >= 2 has them only if it is self-reciprocal,
//! and then their exact count is twice the number of real roots of the halved
//! polynomial in (-2, 2), a Sturm computation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{dyadic_round, sqrt_ub, Ball, PrecCtx};
use crate::error::{CoreError, Result};
use crate::poly::{IntPoly, QPoly};

/// A certified, isolated root of the base polynomial.
#[derive(Clone, Debug)]
pub struct RootBall {
    pub ball: Ball,
    pub is_real: bool,
}

impl RootBall {
    pub fn re_f64(&self) -> f64 {
        self.ball.to_f64().0
    }
    pub fn im_f64(&self) -> f64 {
        self.ball.to_f64().1
    }
}

/// How irreducibility was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrredProof {
    Degree1,
    /// Irreducible modulo this prime.
    ModPrime(u64),
    /// Exhaustive factor reconstruction from certified root clusters found
    /// no integer factor of degree <= deg/2.
    RootClusterSearch,
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact complex Horner evaluation at a rational point.
fn eval_c(p: &IntPoly, zr: &BigRational, zi: &BigRational) -> (BigRational, BigRational) {
    let mut ar = BigRational::zero();
    let mut ai = BigRational::zero();
    for c in p.coeffs.iter().rev() {
        let nr = &ar * zr - &ai * zi + BigRational::from_integer(c.clone());
        let ni = ar * zi + ai * zr;
        ar = nr;
        ai = ni;
    }
    (ar, ai)
}

fn bits_of(q: &BigRational) -> i64 {
    // rough log2 of a positive rational
    (q.numer().bits() as i64) - (q.denom().bits() as i64)
}

/// Newton-polish a starting approximation until the certified radius
/// deg*|p(z)/p'(z)| drops below `target`. The iterate stays exactly real when
/// the start is real, because all coefficients are real.
fn newton_certify(
    p: &IntPoly,
    dp: &IntPoly,
    start: (BigRational, BigRational),
    target: &BigRational,
    prec: PrecCtx,
) -> Option<Ball> {
    let d2 = big((p.degree() * p.degree()) as i64);
    let target_bits = (-bits_of(target)).max(8) as u32 + 32;
    let bits_cap = target_bits.max(prec.start_bits).min(prec.max_bits.max(64));
    let mut bits = prec.start_bits.max(64).min(bits_cap);
    let mut zr = dyadic_round(&start.0, bits);
    let mut zi = if start.1.is_zero() {
        BigRational::zero()
    } else {
        dyadic_round(&start.1, bits)
    };
    for _ in 0..64 {
        let (pr, pi) = eval_c(p, &zr, &zi);
        let (qr, qi) = eval_c(dp, &zr, &zi);
        let q2 = &qr * &qr + &qi * &qi;
        if q2.is_zero() {
            // landed on a critical point; nudge off it
            zr += BigRational::new(BigInt::one(), BigInt::one() << 20);
            continue;
        }
        let p2 = &pr * &pr + &pi * &pi;
        let rad2 = &d2 * &p2 / &q2;
        let rad = sqrt_ub(&rad2, bits);
        if &rad <= target {
            return Some(Ball { re: zr, im: zi, rad });
        }
        // delta = p(z) * conj(p'(z)) / |p'(z)|^2
        let dr = (&pr * &qr + &pi * &qi) / &q2;
        let di = (&pi * &qr - &pr * &qi) / &q2;
        zr = dyadic_round(&(&zr - &dr), bits);
        zi = if zi.is_zero() && di.is_zero() {
            BigRational::zero()
        } else {
            dyadic_round(&(&zi - &di), bits)
        };
        bits = (bits * 2).min(bits_cap);
    }
    None
}

fn durand_kerner(p: &IntPoly, seed_angle: f64) -> Option<Vec<Complex64>> {
    let d = p.degree();
    let lead = p.leading().to_f64()?;
    let c: Vec<f64> = p
        .coeffs
        .iter()
        .map(|x| x.to_f64().map(|v| v / lead))
        .collect::<Option<Vec<_>>>()?;
    if !c.iter().all(|v| v.is_finite()) {
        return None;
    }
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=d).rev() {
            acc = acc * z + Complex64::new(c[k], 0.0);
        }
        acc
    };
    let radius = 1.0 + c[..d].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (d as f64) + seed_angle;
            Complex64::from_polar(radius * 0.7, theta)
        })
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm_sqr() == 0.0 {
                return None;
            }
            let delta = eval(z[i]) / denom;
            z[i] -= delta;
            moved = moved.max(delta.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-14 {
            return Some(z);
        }
    }
    Some(z)
}

/// Isolate all roots of a squarefree integer polynomial into pairwise
/// disjoint certified balls of radius at most `target`, sorted by center
/// (real part, then imaginary part).
pub fn isolate_roots(p: &IntPoly, target: &BigRational, prec: PrecCtx) -> Result<Vec<RootBall>> {
    let d = p.degree();
    if d == 0 {
        return Err(CoreError::Invalid("constant polynomial has no roots".into()));
    }
    if d == 1 {
        // exact rational root -c0/c1
        let root = -BigRational::new(p.coeffs[0].clone(), p.coeffs[1].clone());
        return Ok(vec![RootBall { ball: Ball::from_rational(&root), is_real: true }]);
    }
    let dp = p.derivative();
    let g = p.to_qpoly().gcd(&dp.to_qpoly());
    if g.degree() > 0 {
        return Err(CoreError::Invalid(
            "polynomial must be squarefree for root isolation".into(),
        ));
    }
    let chain = p.to_qpoly().sturm_chain();
    let n_real = QPoly::count_real_roots(&chain);

    let mut attempt_target = target.clone();
    for attempt in 0..4 {
        let seed = 0.37 + 0.91 * attempt as f64;
        let approx = match durand_kerner(p, seed) {
            Some(a) => a,
            None => {
                return Err(CoreError::PrecisionExhausted {
                    bits: 53,
                    context: "floating root approximation failed".into(),
                })
            }
        };
        // The n_real approximations closest to the axis are the real ones.
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| {
            approx[a]
                .im
                .abs()
                .partial_cmp(&approx[b].im.abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let real_idx = &idx[..n_real];
        let upper_idx: Vec<usize> = idx[n_real..]
            .iter()
            .copied()
            .filter(|&i| approx[i].im > 0.0)
            .collect();
        if upper_idx.len() * 2 + n_real != d {
            attempt_target = &attempt_target / big(4);
            continue;
        }

        let mut balls: Vec<RootBall> = Vec::with_capacity(d);
        let mut ok = true;
        for &i in real_idx {
            let start = (
                BigRational::from_float(approx[i].re).unwrap_or_else(BigRational::zero),
                BigRational::zero(),
            );
            match newton_certify(p, &dp, start, &attempt_target, prec) {
                Some(b) => balls.push(RootBall { ball: b, is_real: true }),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            for &i in &upper_idx {
                let start = (
                    BigRational::from_float(approx[i].re).unwrap_or_else(BigRational::zero),
                    BigRational::from_float(approx[i].im).unwrap_or_else(BigRational::zero),
                );
                match newton_certify(p, &dp, start, &attempt_target, prec) {
                    Some(b) => {
                        let mirror = b.conj();
                        balls.push(RootBall { ball: b, is_real: false });
                        balls.push(RootBall { ball: mirror, is_real: false });
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok && balls.len() == d && pairwise_disjoint(&balls) {
            balls.sort_by(|a, b| {
                (&a.ball.re, &a.ball.im)
                    .partial_cmp(&(&b.ball.re, &b.ball.im))
                    .expect("total order on rationals")
            });
            return Ok(balls);
        }
        // collision or stalled refinement: tighten and retry
        attempt_target = &attempt_target / big(16);
    }
    Err(CoreError::PrecisionExhausted {
        bits: prec.max_bits,
        context: format!("could not isolate roots of {}", p),
    })
}

fn pairwise_disjoint(balls: &[RootBall]) -> bool {
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if !balls[i].ball.certainly_disjoint(&balls[j].ball) {
                return false;
            }
        }
    }
    true
}

/// Exact number of roots on the unit circle for an irreducible monic
/// polynomial of degree >= 2.
pub fn on_circle_root_count(p: &IntPoly) -> usize {
    if !p.is_self_reciprocal() {
        return 0;
    }
    match p.halved_on_circle() {
        None => 0,
        Some(q) => {
            let chain = q.to_qpoly().sturm_chain();
            2 * QPoly::count_real_roots_between(&chain, &big(-2), &big(2))
        }
    }
}

// ---- irreducibility over Q ------------------------------------------------

fn poly_mod(p: &IntPoly, q: u64) -> Vec<u64> {
    let qq = BigInt::from(q);
    let mut out: Vec<u64> = p
        .coeffs
        .iter()
        .map(|c| {
            let m = ((c % &qq) + &qq) % &qq;
            m.to_u64().unwrap()
        })
        .collect();
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let mut prod = vec![0u128; (a.len() + b.len() - 1).max(dm.max(1))];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + (x as u128) * (y as u128)) % q as u128;
        }
    }
    // reduce mod m (monic mod q assumed)
    let inv_lead = mod_inv(m[dm], q);
    for i in (dm..prod.len()).rev() {
        let c = (prod[i] % q as u128) as u64;
        if c == 0 {
            continue;
        }
        let f = (c as u128 * inv_lead as u128 % q as u128) as u64;
        for (j, &mc) in m.iter().enumerate() {
            let idx = i - dm + j;
            let sub = (f as u128 * mc as u128) % q as u128;
            prod[idx] = (prod[idx] + q as u128 * q as u128 - sub) % q as u128;
        }
    }
    let mut out: Vec<u64> = prod[..dm.max(1)].iter().map(|&v| (v % q as u128) as u64).collect();
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn mod_inv(a: u64, q: u64) -> u64 {
    // q prime
    let mut t = (0i128, 1i128);
    let mut r = (q as i128, (a % q) as i128);
    while r.1 != 0 {
        let quot = r.0 / r.1;
        t = (t.1, t.0 - quot * t.1);
        r = (r.1, r.0 - quot * r.1);
    }
    (((t.0 % q as i128) + q as i128) % q as i128) as u64
}

fn fp_powmod_q(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    // a^q mod m by square and multiply
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    let mut e = q;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &base, m, q);
        }
        base = fp_mulmod(&base, &base, m, q);
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !(y.len() == 1 && y[0] == 0) {
        let r = fp_rem(&x, &y, q);
        x = y;
        y = r;
    }
    x
}

fn fp_rem(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let mut r: Vec<u64> = a.to_vec();
    if r.len() <= db {
        return r;
    }
    let inv = mod_inv(b[db], q);
    for i in (db..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        let f = (c as u128 * inv as u128 % q as u128) as u64;
        for (j, &bc) in b.iter().enumerate() {
            let idx = i - db + j;
            let sub = (f as u128 * bc as u128) % q as u128;
            r[idx] = ((r[idx] as u128 + q as u128 * q as u128 - sub) % q as u128) as u64;
        }
    }
    let mut out = r[..db.max(1)].to_vec();
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

/// Rabin's criterion: m irreducible over F_q iff x^{q^n} == x (mod m) and
/// gcd(x^{q^{n/r}} - x, m) = 1 for every prime r | n.
fn is_irreducible_mod(p: &IntPoly, q: u64) -> bool {
    let m = poly_mod(p, q);
    let n = m.len() - 1;
    if n != p.degree() || n == 0 {
        return false; // degree dropped mod q
    }
    let x = vec![0u64, 1];
    if n == 1 {
        return true;
    }
    // frobenius iterates: frob[i] = x^{q^i} mod m
    let mut frob = x.clone();
    let mut at = vec![Vec::new(); n + 1];
    at[0] = x.clone();
    for i in 1..=n {
        frob = fp_powmod_q(&frob, &m, q);
        at[i] = frob.clone();
    }
    if at[n] != fp_rem(&x, &m, q) {
        return false;
    }
    let mut primes = Vec::new();
    let mut nn = n;
    let mut f = 2;
    while f * f <= nn {
        if nn % f == 0 {
            primes.push(f);
            while nn % f == 0 {
                nn /= f;
            }
        }
        f += 1;
    }
    if nn > 1 {
        primes.push(nn);
    }
    for r in primes {
        let mut diff = at[n / r].clone();
        // diff - x
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + q - 1) % q;
        let mut d = diff;
        while d.len() > 1 && *d.last().unwrap() == 0 {
            d.pop();
        }
        let g = fp_gcd(&m, &d, q);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Decide irreducibility over Q for a monic integer polynomial. Returns the
/// proof on success and `Reducible { witness }` with a genuine integer factor
/// otherwise.
pub fn prove_irreducible(p: &IntPoly, prec: PrecCtx) -> Result<IrredProof> {
    let d = p.degree();
    if d == 0 {
        return Err(CoreError::Invalid("degree zero polynomial".into()));
    }
    if d == 1 {
        return Ok(IrredProof::Degree1);
    }
    if p.coeffs[0].is_zero() {
        return Err(CoreError::Reducible { witness: IntPoly::from_i64(&[0, 1]) });
    }
    // squarefree gate: gcd(p, p') over Q, integer-ised by clearing denominators
    let g = p.to_qpoly().gcd(&p.derivative().to_qpoly());
    if g.degree() > 0 {
        let mut denlcm = BigInt::one();
        for c in &g.coeffs {
            denlcm = num_integer::lcm(denlcm, c.denom().clone());
        }
        let w = IntPoly::new(
            g.coeffs
                .iter()
                .map(|c| (c * BigRational::from_integer(denlcm.clone())).to_integer())
                .collect(),
        );
        return Err(CoreError::Reducible { witness: w });
    }
    // small integer roots (monic: any rational root is an integer dividing c0)
    let c0 = p.coeffs[0].abs();
    if c0 <= BigInt::from(1_000_000u64) {
        let c0u = c0.to_u64().unwrap();
        let mut k = 1u64;
        while k * k <= c0u {
            if c0u % k == 0 {
                for cand in [k, c0u / k] {
                    for s in [1i64, -1] {
                        let r = BigInt::from(cand) * BigInt::from(s);
                        if p.eval_i(&r).is_zero() {
                            return Err(CoreError::Reducible {
                                witness: IntPoly::new(vec![-r, BigInt::one()]),
                            });
                        }
                    }
                }
            }
            k += 1;
        }
    }
    for q in SMALL_PRIMES {
        if is_irreducible_mod(p, q) {
            return Ok(IrredProof::ModPrime(q));
        }
    }
    // complete fallback: reconstruct candidate factors from certified root
    // clusters; every true factor corresponds to a subset of roots, so an
    // exhausted search certifies irreducibility.
    let bound = p.cauchy_root_bound();
    let mut scale = BigRational::one();
    for _ in 0..(d / 2 + 2) {
        scale = scale * (&bound + BigRational::one());
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << 96)
        / (scale * big((d as i64 + 1) * 4));
    let balls = isolate_roots(p, &target, prec)?;
    let bits = 160u32;
    let mut subset = vec![0usize; d / 2];
    for size in 1..=(d / 2) {
        if search_subsets(p, &balls, size, 0, 0, &mut subset, bits)? {
            unreachable!("search returns factor through error");
        }
    }
    Ok(IrredProof::RootClusterSearch)
}

fn search_subsets(
    p: &IntPoly,
    balls: &[RootBall],
    size: usize,
    depth: usize,
    start: usize,
    subset: &mut Vec<usize>,
    bits: u32,
) -> Result<bool> {
    if depth == size {
        if let Some(w) = candidate_factor(p, balls, &subset[..size], bits)? {
            return Err(CoreError::Reducible { witness: w });
        }
        return Ok(false);
    }
    for i in start..balls.len() {
        subset[depth] = i;
        search_subsets(p, balls, size, depth + 1, i + 1, subset, bits)?;
    }
    Ok(false)
}

/// Multiply out (x - r_i) over the chosen root balls; if every coefficient
/// ball pins down an integer, test the resulting polynomial by exact
/// division. A subset is refuted only when some coefficient ball provably
/// contains no integer, or the division fails.
fn candidate_factor(
    p: &IntPoly,
    balls: &[RootBall],
    subset: &[usize],
    bits: u32,
) -> Result<Option<IntPoly>> {
    let mut coeffs: Vec<Ball> = vec![Ball::from_rational(&BigRational::one())];
    for &i in subset {
        let r = &balls[i].ball;
        let mut next: Vec<Ball> = vec![Ball::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            // multiply by (x - r): shift up, subtract r*c
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&c.mul(r, bits));
        }
        coeffs = next;
    }
    // index = power, so the vector is already constant-first
    let mut int_coeffs = Vec::with_capacity(coeffs.len());
    for b in &coeffs {
        // imaginary part must contain zero
        if b.im.abs() > b.rad {
            return Ok(None);
        }
        let lo = &b.re - &b.rad;
        let hi = &b.re + &b.rad;
        let lo_i = lo.ceil().to_integer();
        let hi_i = hi.floor().to_integer();
        if lo_i > hi_i {
            return Ok(None); // no integer in range: subset refuted
        }
        if lo_i < hi_i {
            // several integers fit: radii were not tight enough to decide
            return Err(CoreError::PrecisionExhausted {
                bits,
                context: "factor reconstruction coefficient ambiguous".into(),
            });
        }
        int_coeffs.push(lo_i);
    }
    let cand = IntPoly::new(int_coeffs);
    if cand.degree() == 0 {
        return Ok(None);
    }
    Ok(p.div_exact(&cand).map(|_| cand))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    // Independent oracle: bounds on (1 + sqrt(5))/2 and (1 - sqrt(5))/2 from
    // integer square root scaling.
    fn golden_bounds() -> (BigRational, BigRational) {
        let five = r(5, 1);
        let lo = crate::ball::sqrt_lb(&five, 80);
        let hi = crate::ball::sqrt_ub(&five, 80);
        (
            (BigRational::one() + lo) / r(2, 1),
            (BigRational::one() + hi) / r(2, 1),
        )
    }

    #[test]
    fn isolates_golden_ratio_roots() {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let roots = isolate_roots(&p, &r(1, 1 << 40), PrecCtx::default()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|rb| rb.is_real));
        // sorted ascending by real part: conjugate first
        let (glo, ghi) = golden_bounds();
        let phi = &roots[1].ball;
        assert!(&phi.re + &phi.rad >= glo && &phi.re - &phi.rad <= ghi);
        let conj = &roots[0].ball;
        // conjugate = 1 - phi = -0.618...
        assert!(conj.re < BigRational::zero());
    }

    #[test]
    fn exact_root_for_linear() {
        let p = IntPoly::from_i64(&[-2, 1]);
        let roots = isolate_roots(&p, &r(1, 1024), PrecCtx::default()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].ball.is_exact());
        assert_eq!(roots[0].ball.re, r(2, 1));
    }

    #[test]
    fn salem_quartic_root_layout() {
        // x^4 - x^3 - x^2 - x + 1: real roots b and 1/b, plus a unit-circle
        // conjugate pair. Oracle: b = (t + sqrt(t^2-4))/2 with t = (1+sqrt(13))/2.
        let p = IntPoly::from_i64(&[1, -1, -1, -1, 1]);
        let roots = isolate_roots(&p, &r(1, 1 << 48), PrecCtx::default()).unwrap();
        assert_eq!(roots.len(), 4);
        let reals: Vec<_> = roots.iter().filter(|rb| rb.is_real).collect();
        let pairs: Vec<_> = roots.iter().filter(|rb| !rb.is_real).collect();
        assert_eq!(reals.len(), 2);
        assert_eq!(pairs.len(), 2);

        let t_lo = (BigRational::one() + crate::ball::sqrt_lb(&r(13, 1), 80)) / r(2, 1);
        let t_hi = (BigRational::one() + crate::ball::sqrt_ub(&r(13, 1), 80)) / r(2, 1);
        let disc_lo = &t_lo * &t_lo - r(4, 1);
        let b_lo = (&t_lo + crate::ball::sqrt_lb(&disc_lo, 80)) / r(2, 1);
        let disc_hi = &t_hi * &t_hi - r(4, 1);
        let b_hi = (&t_hi + crate::ball::sqrt_ub(&disc_hi, 80)) / r(2, 1);
        // 1.7220838... within oracle window
        let beta = reals.iter().max_by(|a, b| a.ball.re.cmp(&b.ball.re)).unwrap();
        assert!(&beta.ball.re + &beta.ball.rad >= b_lo);
        assert!(&beta.ball.re - &beta.ball.rad <= b_hi);
        // second real root is 1/beta (reciprocal polynomial)
        let small = reals.iter().min_by(|a, b| a.ball.re.cmp(&b.ball.re)).unwrap();
        let prod_lo = (&beta.ball.re - &beta.ball.rad) * (&small.ball.re - &small.ball.rad);
        let prod_hi = (&beta.ball.re + &beta.ball.rad) * (&small.ball.re + &small.ball.rad);
        assert!(prod_lo <= BigRational::one() && BigRational::one() <= prod_hi);
    }

    #[test]
    fn refinement_shrinks_and_stays_consistent() {
        let p = IntPoly::from_i64(&[1, -1, -1, -1, 1]);
        let coarse = isolate_roots(&p, &r(1, 1 << 20), PrecCtx::default()).unwrap();
        let fine = isolate_roots(&p, &r(1, 1 << 60), PrecCtx::default()).unwrap();
        for (c, f) in coarse.iter().zip(fine.iter()) {
            assert!(f.ball.rad <= c.ball.rad);
            // same root: centers within the sum of radii
            let d = c.ball.sub(&f.ball);
            assert!(d.center_abs_sq() <= {
                let s = &c.ball.rad + &f.ball.rad;
                &s * &s
            });
        }
    }

    #[test]
    fn unit_circle_counts() {
        assert_eq!(on_circle_root_count(&IntPoly::from_i64(&[1, -1, -1, -1, 1])), 2);
        assert_eq!(
            on_circle_root_count(&IntPoly::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])),
            8
        );
        assert_eq!(on_circle_root_count(&IntPoly::from_i64(&[-1, -1, 1])), 0);
        assert_eq!(on_circle_root_count(&IntPoly::from_i64(&[2, 2, 1])), 0);
    }

    #[test]
    fn irreducibility_verdicts() {
        assert!(matches!(
            prove_irreducible(&IntPoly::from_i64(&[-1, -1, 1]), PrecCtx::default()),
            Ok(_)
        ));
        assert!(matches!(
            prove_irreducible(&IntPoly::from_i64(&[1, -1, -1, -1, 1]), PrecCtx::default()),
            Ok(_)
        ));
        match prove_irreducible(&IntPoly::from_i64(&[-1, 0, 1]), PrecCtx::default()) {
            Err(CoreError::Reducible { witness }) => {
                assert_eq!(witness, IntPoly::from_i64(&[-1, 1]));
            }
            other => panic!("expected reducible, got {:?}", other),
        }
        // x^4 + 4 = (x^2-2x+2)(x^2+2x+2): no rational roots, reducible
        match prove_irreducible(&IntPoly::from_i64(&[4, 0, 0, 0, 1]), PrecCtx::default()) {
            Err(CoreError::Reducible { witness }) => {
                assert!(IntPoly::from_i64(&[4, 0, 0, 0, 1]).div_exact(&witness).is_some());
                assert!(witness.degree() == 2);
            }
            other => panic!("expected reducible, got {:?}", other),
        }
        // Lehmer's polynomial is irreducible
        assert!(matches!(
            prove_irreducible(
                &IntPoly::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]),
                PrecCtx::default()
            ),
            Ok(_)
        ));
    }

    #[test]
    fn cyclotomic_like_reducible_no_rational_root() {
        // x^4 + x^2 + 1 = (x^2+x+1)(x^2-x+1)
        match prove_irreducible(&IntPoly::from_i64(&[1, 0, 1, 0, 1]), PrecCtx::default()) {
            Err(CoreError::Reducible { witness }) => {
                assert!(IntPoly::from_i64(&[1, 0, 1, 0, 1]).div_exact(&witness).is_some());
            }
            other => panic!("expected reducible, got {:?}", other),
        }
    }
}
