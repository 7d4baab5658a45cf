//! Finite levels of the spectrum and their geometry.
//!
//! The spectrum is the set of all digit polynomials in beta; level n holds
//! the sums with coefficients up to beta^n. Enumeration is exact with exact
//! deduplication, since distinct field elements can be numerically close;
//! the measured minimal gap is certified against the product-formula lower
//! bound, and covering radii over product regions feed the relative-density
//! semi-decision.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::attractor::{origin_interior_certificate, InteriorOutcome, SearchBudget};
use crate::ball::PrecCtx;
use crate::error::{CoreError, Result};
use crate::field::{FieldElement, NumberField, Rational};
use crate::places::{Place, PlaceSystem};

/// Hard cap on enumerated points unless a caller raises it.
pub const DEFAULT_MAX_POINTS: usize = 4_000_000;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

enum Store {
    /// All digits have integer coordinates and the base acts integrally:
    /// points are coefficient rows of width `dim`, kept sorted.
    Ints { dim: usize, flat: Vec<i64> },
    /// General exact elements.
    Elems { elems: Vec<FieldElement> },
}

/// One enumerated level of the spectrum: all sums with n+1 coefficients,
/// pairwise distinct as field elements.
pub struct SpectrumLevel {
    pub n: u32,
    /// points dropped by the optional norm pruning, count only
    pub pruned: usize,
    field: NumberField,
    store: Store,
}

impl std::fmt::Debug for SpectrumLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectrumLevel")
            .field("n", &self.n)
            .field("len", &self.len())
            .field("pruned", &self.pruned)
            .finish()
    }
}

impl SpectrumLevel {
    pub fn len(&self) -> usize {
        match &self.store {
            Store::Ints { dim, flat } => flat.len() / dim,
            Store::Elems { elems } => elems.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn element(&self, i: usize) -> FieldElement {
        match &self.store {
            Store::Ints { dim, flat } => {
                let row = &flat[i * dim..(i + 1) * dim];
                let coeffs = row
                    .iter()
                    .map(|&c| Rational::from_integer(BigInt::from(c)))
                    .collect();
                self.field.element(coeffs).expect("row width matches the field degree")
            }
            Store::Elems { elems } => elems[i].clone(),
        }
    }

    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.len()).map(|i| self.element(i)).collect()
    }

    /// Exact membership.
    pub fn contains(&self, x: &FieldElement) -> bool {
        match &self.store {
            Store::Ints { dim, flat } => {
                let mut row = Vec::with_capacity(*dim);
                for c in x.coeffs() {
                    if !c.is_integer() {
                        return false;
                    }
                    match c.to_integer().to_i64() {
                        Some(v) => row.push(v),
                        None => return false,
                    }
                }
                row.resize(*dim, 0);
                let n = flat.len() / dim;
                let mut lo = 0usize;
                let mut hi = n;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    match flat[mid * dim..(mid + 1) * dim].cmp(&row[..]) {
                        std::cmp::Ordering::Less => lo = mid + 1,
                        std::cmp::Ordering::Greater => hi = mid,
                        std::cmp::Ordering::Equal => return true,
                    }
                }
                false
            }
            Store::Elems { elems } => elems.iter().any(|e| e == x),
        }
    }

    /// Floating coordinates at the non-contracting archimedean places, one
    /// row per point; real places contribute one column, complex pairs two.
    pub fn arch_coords_f64(&self, ps: &PlaceSystem) -> Result<Vec<Vec<f64>>> {
        let arch = ps.sbeta_arch();
        let mut axes = Vec::new();
        for (place, _) in &arch {
            let i = place.root_index().expect("archimedean");
            let (re, im) = ps.roots()[i].ball.to_f64();
            axes.push((re, im, matches!(place, Place::ComplexPair(_))));
        }
        let mut out = Vec::with_capacity(self.len());
        match &self.store {
            Store::Ints { dim, flat } => {
                for row in flat.chunks(*dim) {
                    let mut coords = Vec::new();
                    for &(re, im, complex) in &axes {
                        let (mut zr, mut zi) = (0.0f64, 0.0f64);
                        for &c in row.iter().rev() {
                            let (nr, ni) = (zr * re - zi * im + c as f64, zr * im + zi * re);
                            zr = nr;
                            zi = ni;
                        }
                        coords.push(zr);
                        if complex {
                            coords.push(zi);
                        }
                    }
                    out.push(coords);
                }
            }
            Store::Elems { elems } => {
                for e in elems {
                    let mut coords = Vec::new();
                    for (j, (place, _)) in arch.iter().enumerate() {
                        let b = ps.embed_at(e, place, 64)?;
                        let (re, im) = b.to_f64();
                        coords.push(re);
                        if matches!(arch[j].0, Place::ComplexPair(_)) {
                            coords.push(im);
                        }
                    }
                    out.push(coords);
                }
            }
        }
        Ok(out)
    }
}

struct IntSetup {
    dim: usize,
    /// digit coefficient rows, dim entries each
    digit_rows: Vec<Vec<i64>>,
    /// monic minpoly coefficients below the leading one (degree >= 2), or
    /// the integer base itself (degree 1)
    action: IntAction,
}

enum IntAction {
    Scalar(i64),
    Modular(Vec<i64>),
}

fn int_setup(field: &NumberField, digits: &[FieldElement]) -> Option<IntSetup> {
    let d = field.degree();
    let to_i64 = |q: &BigRational| -> Option<i64> {
        if q.is_integer() {
            q.to_integer().to_i64()
        } else {
            None
        }
    };
    let mut digit_rows = Vec::with_capacity(digits.len());
    let dim = d.max(1);
    for digit in digits {
        let mut row = Vec::with_capacity(dim);
        for c in digit.coeffs() {
            row.push(to_i64(c)?);
        }
        row.resize(dim, 0);
        digit_rows.push(row);
    }
    if d == 1 {
        let beta = field.beta_rational()?;
        if !beta.is_integer() {
            return None;
        }
        let s = beta.to_integer().to_i64()?;
        Some(IntSetup { dim, digit_rows, action: IntAction::Scalar(s) })
    } else {
        let mp = field.minpoly();
        if !mp.is_monic() {
            return None;
        }
        let mut m = Vec::with_capacity(d);
        for c in &mp.coeffs[..d] {
            m.push(c.to_i64()?);
        }
        Some(IntSetup { dim, digit_rows, action: IntAction::Modular(m) })
    }
}

/// Sort rows of width `dim` and drop exact duplicates.
fn sort_dedup_rows(flat: Vec<i64>, dim: usize) -> Vec<i64> {
    let rows = flat.len() / dim;
    let mut idx: Vec<u32> = (0..rows as u32).collect();
    idx.sort_unstable_by(|&a, &b| {
        flat[a as usize * dim..(a as usize + 1) * dim]
            .cmp(&flat[b as usize * dim..(b as usize + 1) * dim])
    });
    let mut out = Vec::with_capacity(flat.len());
    let mut last: Option<u32> = None;
    for &i in &idx {
        let row = &flat[i as usize * dim..(i as usize + 1) * dim];
        if let Some(l) = last {
            if &flat[l as usize * dim..(l as usize + 1) * dim] == row {
                continue;
            }
        }
        out.extend_from_slice(row);
        last = Some(i);
    }
    out
}

/// beta * row + digit in the power basis, checked in wide arithmetic.
fn int_step(row: &[i64], digit: &[i64], action: &IntAction) -> Option<Vec<i64>> {
    match action {
        IntAction::Scalar(s) => {
            let v = (row[0] as i128).checked_mul(*s as i128)? + digit[0] as i128;
            Some(vec![i64::try_from(v).ok()?])
        }
        IntAction::Modular(m) => {
            let d = m.len();
            let top = row[d - 1] as i128;
            let mut out = Vec::with_capacity(d);
            for j in 0..d {
                let shifted = if j == 0 { 0i128 } else { row[j - 1] as i128 };
                let v = shifted - top.checked_mul(m[j] as i128)? + digit[j] as i128;
                out.push(i64::try_from(v).ok()?);
            }
            Some(out)
        }
    }
}

/// Exact breadth-first enumeration of level n: all sums of n+1 digit
/// coefficients, deduplicated exactly. Points whose certified norm exceeds
/// `prune_radius` are dropped and counted.
pub fn enumerate_spectrum(
    ps: &PlaceSystem,
    digits: &[FieldElement],
    n: u32,
    prune_radius: Option<&Rational>,
    max_points: usize,
) -> Result<SpectrumLevel> {
    if digits.is_empty() {
        return Err(CoreError::Invalid("empty digit set".into()));
    }
    for d in digits {
        d.same_field(&ps.field().zero())?;
    }
    let field = ps.field().clone();
    if let Some(setup) = int_setup(&field, digits) {
        if let Some(level) = enumerate_ints(ps, &field, &setup, n, prune_radius, max_points)? {
            return Ok(level);
        }
        // fell off the fast integer range; redo exactly
    }
    enumerate_elems(ps, &field, digits, n, prune_radius, max_points)
}

fn enumerate_ints(
    ps: &PlaceSystem,
    field: &NumberField,
    setup: &IntSetup,
    n: u32,
    prune_radius: Option<&Rational>,
    max_points: usize,
) -> Result<Option<SpectrumLevel>> {
    let dim = setup.dim;
    let mut flat: Vec<i64> = Vec::new();
    for row in &setup.digit_rows {
        flat.extend_from_slice(row);
    }
    let mut flat = sort_dedup_rows(flat, dim);
    let mut pruned = 0usize;
    for _ in 0..n {
        let rows = flat.len() / dim;
        let cand = rows.saturating_mul(setup.digit_rows.len());
        if cand > max_points {
            return Err(CoreError::MemoryBudgetExceeded(format!(
                "level would hold up to {} points",
                cand
            )));
        }
        let mut next = Vec::with_capacity(cand * dim);
        for row in flat.chunks(dim) {
            for digit in &setup.digit_rows {
                match int_step(row, digit, &setup.action) {
                    Some(r) => next.extend_from_slice(&r),
                    None => return Ok(None),
                }
            }
        }
        flat = sort_dedup_rows(next, dim);
        if let Some(r) = prune_radius {
            let (kept, dropped) = prune_ints(ps, field, flat, dim, r)?;
            flat = kept;
            pruned += dropped;
        }
    }
    Ok(Some(SpectrumLevel { n, pruned, field: field.clone(), store: Store::Ints { dim, flat } }))
}

/// Drop rows whose norm is certifiably above the radius.
fn prune_ints(
    ps: &PlaceSystem,
    field: &NumberField,
    flat: Vec<i64>,
    dim: usize,
    radius: &Rational,
) -> Result<(Vec<i64>, usize)> {
    let level = SpectrumLevel {
        n: 0,
        pruned: 0,
        field: field.clone(),
        store: Store::Ints { dim, flat },
    };
    let coords = level.arch_coords_f64(ps)?;
    let r_f = radius.to_f64().unwrap_or(f64::MAX);
    let flat = match level.store {
        Store::Ints { flat, .. } => flat,
        _ => unreachable!(),
    };
    let mut kept = Vec::with_capacity(flat.len());
    let mut dropped = 0usize;
    let arch = ps.sbeta_arch();
    for (i, row) in flat.chunks(dim).enumerate() {
        let mut maxc = 0.0f64;
        let mut k = 0;
        for (place, _) in &arch {
            match place {
                Place::ComplexPair(_) => {
                    maxc = maxc.max(coords[i][k].hypot(coords[i][k + 1]));
                    k += 2;
                }
                _ => {
                    maxc = maxc.max(coords[i][k].abs());
                    k += 1;
                }
            }
        }
        if maxc <= r_f * (1.0 - 1e-9) + 1e-12 {
            kept.extend_from_slice(row);
            continue;
        }
        // near or over the line: decide exactly
        let coeffs = row
            .iter()
            .map(|&c| Rational::from_integer(BigInt::from(c)))
            .collect();
        let x = field.element(coeffs)?;
        if norm_certainly_above(ps, &x, radius, 96)? {
            dropped += 1;
        } else {
            kept.extend_from_slice(row);
        }
    }
    Ok((kept, dropped))
}

/// Certified max-place norm strictly above r (finite places included).
fn norm_certainly_above(
    ps: &PlaceSystem,
    x: &FieldElement,
    r: &Rational,
    bits: u32,
) -> Result<bool> {
    for (place, _) in &ps.sbeta_arch() {
        let b = ps.embed_at(x, place, bits)?;
        if &b.abs_lb(bits) > r {
            return Ok(true);
        }
    }
    for place in ps.finite_places() {
        if let Place::Finite { prime, .. } = &place {
            let q = x.to_rational().ok_or_else(|| {
                CoreError::Invalid("finite places demand rational elements".into())
            })?;
            if &PlaceSystem::finite_abs(&q, prime) > r {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn enumerate_elems(
    ps: &PlaceSystem,
    field: &NumberField,
    digits: &[FieldElement],
    n: u32,
    prune_radius: Option<&Rational>,
    max_points: usize,
) -> Result<SpectrumLevel> {
    let mut set: HashSet<FieldElement> = digits.iter().cloned().collect();
    let mut pruned = 0usize;
    for _ in 0..n {
        if set.len().saturating_mul(digits.len()) > max_points {
            return Err(CoreError::MemoryBudgetExceeded(format!(
                "level would hold up to {} points",
                set.len() * digits.len()
            )));
        }
        let mut next = HashSet::with_capacity(set.len() * digits.len());
        for x in &set {
            let bx = x.mul_beta();
            for a in digits {
                next.insert(bx.add(a));
            }
        }
        if let Some(r) = prune_radius {
            let mut kept = HashSet::with_capacity(next.len());
            for x in next {
                if norm_certainly_above(ps, &x, r, 96)? {
                    pruned += 1;
                } else {
                    kept.insert(x);
                }
            }
            next = kept;
        }
        set = next;
    }
    let mut elems: Vec<FieldElement> = set.into_iter().collect();
    // deterministic order: by coefficient vectors
    elems.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    Ok(SpectrumLevel { n, pruned, field: field.clone(), store: Store::Elems { elems } })
}

/// Product-formula lower bound on the norm of a nonzero difference of
/// spectrum points: certified upper bounds on the places outside the
/// representation space are multiplied up and pushed through the product
/// formula, weighted by local degrees.
pub fn separation_bound(ps: &PlaceSystem, digits: &[FieldElement]) -> Result<Rational> {
    if digits.len() < 2 {
        return Ok(Rational::one());
    }
    let field = ps.field();
    let mut denom_lcm = BigInt::one();
    for d in digits {
        denom_lcm = denom_lcm.lcm(&d.denominator_lcm());
    }
    let mut p_acc: Rational;
    let s: u32;
    if field.degree() == 1 {
        // finite places away from the denominator of beta: coefficients
        // contribute at most the prime part of the digit denominators
        let t = field.beta_rational().expect("degree one").denom().clone();
        let mut d_part = denom_lcm;
        let mut g = d_part.gcd(&t);
        while g > BigInt::one() {
            d_part /= &g;
            g = d_part.gcd(&t);
        }
        p_acc = Rational::from_integer(d_part);
        s = 1 + ps.finite_places().len() as u32;
    } else {
        // D z is an algebraic integer, so the finite product is at most D^d
        let dl = Rational::from_integer(denom_lcm);
        p_acc = Rational::one();
        for _ in 0..field.degree() {
            p_acc *= &dl;
        }
        let mut s_acc = 0u32;
        for (place, _) in &ps.sbeta_arch() {
            s_acc += place.local_degree();
        }
        s = s_acc;
        for place in ps.contracting_arch() {
            let mut bits = 128u32;
            let (lb_one_minus, mut maxdiff);
            loop {
                let (_, beta_ub) = ps.beta_abs_bounds(&place, bits)?;
                if beta_ub < Rational::one() {
                    lb_one_minus = Rational::one() - beta_ub;
                    maxdiff = Rational::zero();
                    for (i, a) in digits.iter().enumerate() {
                        for b in &digits[i + 1..] {
                            let diff = ps.embed_at(&a.sub(b), &place, bits)?;
                            let ub = diff.abs_ub(bits);
                            if ub > maxdiff {
                                maxdiff = ub;
                            }
                        }
                    }
                    break;
                }
                bits *= 2;
                if bits > 1 << 14 {
                    return Err(CoreError::PrecisionExhausted {
                        bits,
                        context: "contracting place refused to certify".into(),
                    });
                }
            }
            let c = maxdiff / lb_one_minus;
            for _ in 0..place.local_degree() {
                p_acc *= &c;
            }
        }
    }
    if p_acc <= Rational::one() {
        return Ok(Rational::one());
    }
    // largest dyadic r with r^s <= 1/P, by bisection
    let target = p_acc.recip();
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    for _ in 0..64 {
        let mid = (&lo + &hi) / rat(2, 1);
        let mut pw = Rational::one();
        for _ in 0..s {
            pw *= &mid;
        }
        if pw <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// One flag per non-contracting archimedean place: true when the place is
/// a complex pair, i.e. spans two flattened coordinates.
fn place_kinds(ps: &PlaceSystem) -> Vec<bool> {
    ps.sbeta_arch()
        .iter()
        .map(|(p, _)| matches!(p, Place::ComplexPair(_)))
        .collect()
}

/// Max-place distance of flattened floating coordinate rows.
fn max_norm_f64(kinds: &[bool], a: &[f64], b: &[f64]) -> f64 {
    let mut m = 0.0f64;
    let mut k = 0;
    for &complex in kinds {
        if complex {
            m = m.max((a[k] - b[k]).hypot(a[k + 1] - b[k + 1]));
            k += 2;
        } else {
            m = m.max((a[k] - b[k]).abs());
            k += 1;
        }
    }
    m
}

/// Max-place distance of two rationals, finite places included: the exact
/// norm for degree-one fields.
fn rational_norm(ps: &PlaceSystem, d: &Rational) -> Rational {
    let mut m = d.abs();
    for place in ps.finite_places() {
        if let Place::Finite { prime, .. } = place {
            let f = PlaceSystem::finite_abs(d, &prime);
            if f > m {
                m = f;
            }
        }
    }
    m
}

/// Minimal pairwise distance in the max-place norm, as a certified interval.
pub fn min_gap(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    prec: PrecCtx,
) -> Result<(Rational, Rational)> {
    if level.len() < 2 {
        return Err(CoreError::Invalid("gap needs at least two points".into()));
    }
    if ps.field().degree() == 1 {
        return min_gap_rational(ps, level);
    }
    min_gap_arch(ps, level, prec)
}

/// Exact minimal gap for rational bases: sort by value, then bound the scan
/// window by the best max-norm found so far (the real part alone already
/// reaches the running minimum).
fn min_gap_rational(ps: &PlaceSystem, level: &SpectrumLevel) -> Result<(Rational, Rational)> {
    let mut vals: Vec<Rational> = (0..level.len())
        .map(|i| level.element(i).to_rational().expect("degree one"))
        .collect();
    vals.sort();
    let mut best: Option<Rational> = None;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            let real = &vals[j] - &vals[i];
            if let Some(b) = &best {
                if &real >= b {
                    break; // later j only grow the real part
                }
            }
            let norm = rational_norm(ps, &real);
            if best.as_ref().map_or(true, |b| &norm < b) {
                best = Some(norm);
            }
        }
    }
    let g = best.expect("at least one pair");
    Ok((g.clone(), g))
}

/// Bucketed nearest-pair search on floating coordinates, then exact
/// certification of every candidate pair.
fn min_gap_arch(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    prec: PrecCtx,
) -> Result<(Rational, Rational)> {
    let coords = level.arch_coords_f64(ps)?;
    let kinds = place_kinds(ps);
    let dims = coords[0].len();
    let n = coords.len();
    let mut approx_best = f64::MAX;
    // seed the cell size with a sampled nearest-neighbour estimate
    for i in 1..n.min(512) {
        let d = max_norm_f64(&kinds, &coords[i], &coords[i - 1]);
        if d > 0.0 {
            approx_best = approx_best.min(d);
        }
    }
    if !approx_best.is_finite() || approx_best <= 0.0 {
        approx_best = 1.0;
    }
    // scan pairs within one cell neighbourhood; any skipped pair is at
    // least a whole cell apart, so a best below the cell size is global
    let scan = |cell: f64, keep: f64| -> (f64, Vec<(usize, usize)>) {
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::with_capacity(n * 2);
        for (i, c) in coords.iter().enumerate() {
            let key: Vec<i64> = c.iter().map(|x| (x / cell).floor() as i64).collect();
            buckets.entry(key).or_default().push(i as u32);
        }
        let mut offsets = vec![vec![0i64; dims]];
        for k in 0..dims {
            let mut more = Vec::new();
            for o in &offsets {
                for s in [-1i64, 1] {
                    let mut v = o.clone();
                    v[k] = s;
                    more.push(v);
                }
            }
            offsets.extend(more);
        }
        let mut best = f64::MAX;
        let mut pairs = Vec::new();
        for (key, members) in &buckets {
            for off in &offsets {
                let nk: Vec<i64> = key.iter().zip(off).map(|(a, b)| a + b).collect();
                if nk < *key {
                    continue; // each unordered cell pair once
                }
                let Some(others) = buckets.get(&nk) else { continue };
                for &i in members {
                    for &j in others {
                        if nk == *key && j <= i {
                            continue;
                        }
                        let d = max_norm_f64(&kinds, &coords[i as usize], &coords[j as usize]);
                        if d < best {
                            best = d;
                        }
                        if d <= keep {
                            pairs.push((i as usize, j as usize));
                        }
                    }
                }
            }
        }
        (best, pairs)
    };
    let mut cell = approx_best;
    let mut best = f64::MAX;
    for _ in 0..10 {
        let (b, _) = scan(cell, -1.0);
        best = b;
        if best.is_finite() && best <= cell {
            break;
        }
        // nothing certain inside the neighbourhood: widen the cells
        cell *= 4.0;
    }
    if !best.is_finite() || best > cell {
        return Err(CoreError::Invalid("nearest-pair search failed to localise".into()));
    }
    // candidates within a whisker of the floating minimum
    let slack = best * 1e-9 + 1e-12;
    let (_, cands) = scan(best + slack, best + slack);
    if cands.is_empty() {
        return Err(CoreError::Invalid("nearest-pair candidates vanished".into()));
    }
    // exact certification of the candidates
    let mut lb_min: Option<Rational> = None;
    let mut ub_min: Option<Rational> = None;
    for (i, j) in cands {
        let diff = level.element(i).sub(&level.element(j));
        let (lb, ub) = element_norm_bounds(ps, &diff, prec)?;
        if lb_min.as_ref().map_or(true, |m| &lb < m) {
            lb_min = Some(lb);
        }
        if ub_min.as_ref().map_or(true, |m| &ub < m) {
            ub_min = Some(ub);
        }
    }
    Ok((lb_min.unwrap(), ub_min.unwrap()))
}

/// Certified interval for the max-place norm of an element.
fn element_norm_bounds(
    ps: &PlaceSystem,
    x: &FieldElement,
    prec: PrecCtx,
) -> Result<(Rational, Rational)> {
    let mut out = None;
    for bits in prec.ladder() {
        let mut lb = Rational::zero();
        let mut ub = Rational::zero();
        for (place, _) in &ps.sbeta_arch() {
            let b = ps.embed_at(x, place, bits)?;
            let l = b.abs_lb(bits);
            let u = b.abs_ub(bits);
            if l > lb {
                lb = l;
            }
            if u > ub {
                ub = u;
            }
        }
        // finite part is exact
        if !ps.finite_places().is_empty() {
            if let Some(q) = x.to_rational() {
                let f = rational_norm(ps, &q);
                if f > lb {
                    lb = f.clone();
                }
                if f > ub {
                    ub = f;
                }
            }
        }
        let spread = &ub - &lb;
        out = Some((lb.clone(), ub.clone()));
        if spread * rat(1 << 20, 1) <= ub {
            break;
        }
    }
    Ok(out.expect("ladder yields at least one rung"))
}

/// An axis-aligned box per non-contracting archimedean place, in canonical
/// place order; the region the covering radius is measured over.
#[derive(Clone, Debug)]
pub struct Region {
    pub boxes: Vec<RegionBox>,
}

#[derive(Clone, Debug)]
pub struct RegionBox {
    pub re_lo: Rational,
    pub re_hi: Rational,
    pub im_lo: Rational,
    pub im_hi: Rational,
}

impl RegionBox {
    pub fn interval(lo: Rational, hi: Rational) -> RegionBox {
        RegionBox { re_lo: lo, re_hi: hi, im_lo: Rational::zero(), im_hi: Rational::zero() }
    }

    pub fn square(radius: &Rational) -> RegionBox {
        RegionBox {
            re_lo: -radius.clone(),
            re_hi: radius.clone(),
            im_lo: -radius.clone(),
            im_hi: radius.clone(),
        }
    }
}

impl Region {
    /// A single real interval; only valid for systems with one
    /// non-contracting archimedean place.
    pub fn interval(lo: Rational, hi: Rational) -> Region {
        Region { boxes: vec![RegionBox::interval(lo, hi)] }
    }

    /// The domain of radius one scaled by `factor` at every place: the box
    /// hull of beta^n times the unit domain when factor = |beta|^n.
    pub fn scaled_domain(ps: &PlaceSystem, factor: &Rational) -> Region {
        let boxes = ps
            .sbeta_arch()
            .iter()
            .map(|(place, _)| match place {
                Place::ComplexPair(_) => RegionBox::square(factor),
                _ => RegionBox::interval(-factor.clone(), factor.clone()),
            })
            .collect();
        Region { boxes }
    }
}

/// Covering radius of the level over the region, as a certified interval:
/// the furthest any region point sits from the spectrum, in the max-place
/// norm over the non-contracting archimedean places.
pub fn covering_radius(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    region: &Region,
    prec: PrecCtx,
) -> Result<(Rational, Rational)> {
    let arch = ps.sbeta_arch();
    if region.boxes.len() != arch.len() {
        return Err(CoreError::Invalid(format!(
            "expected {} region boxes, got {}",
            arch.len(),
            region.boxes.len()
        )));
    }
    if level.is_empty() {
        return Err(CoreError::Invalid("empty level".into()));
    }
    if ps.field().degree() == 1 && ps.finite_places().is_empty() {
        return covering_radius_exact(level, &region.boxes[0]);
    }
    if !ps.finite_places().is_empty() {
        return Err(CoreError::Invalid(
            "covering radius over a rational base with finite places is not defined here".into(),
        ));
    }
    covering_radius_grid(ps, level, region, prec)
}

/// Integer-base exact sweep: the extremes are the region ends and the
/// midpoints between consecutive points.
fn covering_radius_exact(
    level: &SpectrumLevel,
    bx: &RegionBox,
) -> Result<(Rational, Rational)> {
    let mut vals: Vec<Rational> = (0..level.len())
        .map(|i| level.element(i).to_rational().expect("degree one"))
        .collect();
    vals.sort();
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
        best.expect("nonempty level")
    };
    let mut cands = vec![bx.re_lo.clone(), bx.re_hi.clone()];
    for pair in vals.windows(2) {
        let mid = (&pair[0] + &pair[1]) / rat(2, 1);
        if mid >= bx.re_lo && mid <= bx.re_hi {
            cands.push(mid);
        }
    }
    let r = cands.iter().map(&nearest).max().expect("candidates exist");
    Ok((r.clone(), r))
}

fn covering_radius_grid(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    region: &Region,
    prec: PrecCtx,
) -> Result<(Rational, Rational)> {
    let arch = ps.sbeta_arch();
    let coords = level.arch_coords_f64(ps)?;
    // flatten axes
    struct Axis {
        lo: Rational,
        hi: Rational,
    }
    let mut axes = Vec::new();
    for (j, (place, _)) in arch.iter().enumerate() {
        let bx = &region.boxes[j];
        axes.push(Axis { lo: bx.re_lo.clone(), hi: bx.re_hi.clone() });
        if matches!(place, Place::ComplexPair(_)) {
            axes.push(Axis { lo: bx.im_lo.clone(), hi: bx.im_hi.clone() });
        }
    }
    // pitch: divide the largest side so the grid stays under budget
    let mut side_max = Rational::zero();
    for ax in &axes {
        let s = &ax.hi - &ax.lo;
        if s > side_max {
            side_max = s;
        }
    }
    if side_max.is_zero() {
        side_max = Rational::one();
    }
    let mut divisions = 32u32;
    loop {
        let mut total = 1usize;
        for ax in &axes {
            let side = &ax.hi - &ax.lo;
            let cnt = ((&side / &side_max) * rat(divisions as i64, 1)).ceil().to_integer();
            total = total.saturating_mul(cnt.to_usize().unwrap_or(usize::MAX) + 1);
        }
        if total <= 200_000 {
            break;
        }
        if divisions <= 4 {
            return Err(CoreError::MemoryBudgetExceeded("covering grid too large".into()));
        }
        divisions /= 2;
    }
    let pitch = &side_max / rat(divisions as i64, 1);
    let pitch_f = pitch.to_f64().unwrap_or(1e-3);

    // per-axis sample positions
    let mut samples: Vec<Vec<Rational>> = Vec::new();
    for ax in &axes {
        let side = &ax.hi - &ax.lo;
        let cnt = (&side / &pitch).ceil().to_integer().to_usize().unwrap_or(0) + 1;
        let mut xs = Vec::with_capacity(cnt);
        for i in 0..cnt {
            let x = &ax.lo + &pitch * rat(i as i64, 1);
            xs.push(if x > ax.hi { ax.hi.clone() } else { x });
        }
        samples.push(xs);
    }

    let max_norm = |a: &[f64], b: &[f64]| -> f64 {
        let mut m = 0.0f64;
        let mut k = 0;
        for (place, _) in &arch {
            match place {
                Place::ComplexPair(_) => {
                    m = m.max((a[k] - b[k]).hypot(a[k + 1] - b[k + 1]));
                    k += 2;
                }
                _ => {
                    m = m.max((a[k] - b[k]).abs());
                    k += 1;
                }
            }
        }
        m
    };

    let dims = axes.len();
    let mut idx = vec![0usize; dims];
    let mut worst: Vec<(f64, Vec<Rational>, usize)> = Vec::new(); // (dist, point, nearest)
    let bits = prec.start_bits.max(96);
    let mut ub_overall = Rational::zero();
    loop {
        let point: Vec<Rational> =
            idx.iter().zip(&samples).map(|(&i, xs)| xs[i].clone()).collect();
        let pf: Vec<f64> = point.iter().map(|q| q.to_f64().unwrap_or(0.0)).collect();
        let mut near = 0usize;
        let mut near_d = f64::MAX;
        for (i, c) in coords.iter().enumerate() {
            let d = max_norm(&pf, c);
            if d < near_d {
                near_d = d;
                near = i;
            }
        }
        // a sound upper bound for this grid point: exact distance to the
        // floating nearest
        let ub = exact_point_dist_ub(ps, level, near, &point, bits)?;
        if ub > ub_overall {
            ub_overall = ub;
        }
        worst.push((near_d, point, near));
        if worst.len() > 16 {
            worst.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
            worst.truncate(8);
        }
        let mut pos = 0;
        loop {
            if pos == dims {
                // finished
                let mut lb_overall = Rational::zero();
                for (_, point, _) in &worst {
                    let lb = exact_point_dist_lb(ps, level, &coords, point, bits, pitch_f)?;
                    if lb > lb_overall {
                        lb_overall = lb;
                    }
                }
                let ub = ub_overall + rat(3, 4) * &pitch;
                return Ok((lb_overall, ub));
            }
            idx[pos] += 1;
            if idx[pos] < samples[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Exact upper bound on the distance from a rational grid point (flattened
/// coordinates) to one level point.
fn exact_point_dist_ub(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    i: usize,
    point: &[Rational],
    bits: u32,
) -> Result<Rational> {
    let x = level.element(i);
    let arch = ps.sbeta_arch();
    let mut k = 0usize;
    let mut m = Rational::zero();
    for (place, _) in &arch {
        let b = ps.embed_at(&x, place, bits)?;
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
        let diff = b.sub(&crate::ball::Ball::exact(pre, pim));
        let u = diff.abs_ub(bits);
        if u > m {
            m = u;
        }
    }
    Ok(m)
}

/// Exact lower bound on the nearest distance from a grid point: floating
/// preselection of candidates, exact bounds on those, and every excluded
/// point certifiably further away.
fn exact_point_dist_lb(
    ps: &PlaceSystem,
    level: &SpectrumLevel,
    coords: &[Vec<f64>],
    point: &[Rational],
    bits: u32,
    pitch_f: f64,
) -> Result<Rational> {
    let arch = ps.sbeta_arch();
    let pf: Vec<f64> = point.iter().map(|q| q.to_f64().unwrap_or(0.0)).collect();
    let max_norm = |a: &[f64], b: &[f64]| -> f64 {
        let mut m = 0.0f64;
        let mut k = 0;
        for (place, _) in &arch {
            match place {
                Place::ComplexPair(_) => {
                    m = m.max((a[k] - b[k]).hypot(a[k + 1] - b[k + 1]));
                    k += 2;
                }
                _ => {
                    m = m.max((a[k] - b[k]).abs());
                    k += 1;
                }
            }
        }
        m
    };
    let mut best_f = f64::MAX;
    for c in coords {
        best_f = best_f.min(max_norm(&pf, c));
    }
    let slack = best_f * 1e-9 + pitch_f * 1e-6 + 1e-12;
    let mut lb: Option<Rational> = None;
    for (i, c) in coords.iter().enumerate() {
        if max_norm(&pf, c) <= best_f + slack {
            let x = level.element(i);
            let mut k = 0usize;
            let mut place_lb = Rational::zero();
            for (place, _) in &arch {
                let b = ps.embed_at(&x, place, bits)?;
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
                let diff = b.sub(&crate::ball::Ball::exact(pre, pim));
                let l = diff.abs_lb(bits);
                if l > place_lb {
                    place_lb = l;
                }
            }
            if lb.as_ref().map_or(true, |m| &place_lb < m) {
                lb = Some(place_lb);
            }
        }
    }
    Ok(lb.unwrap_or_else(Rational::zero))
}

/// Relative-density verdict for the spectrum.
#[derive(Clone, Debug, PartialEq)]
pub enum DensityVerdict {
    /// an interior certificate exists, so the spectrum is relatively dense
    CertifiedDense,
    /// covering radii stabilise over growing levels; the value is the last
    /// measured outer bound
    EvidenceDense(Rational),
    /// a one-sided obstruction keeps the spectrum away from a half-space
    EvidenceSparse,
    Inconclusive,
}

impl serde::Serialize for DensityVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (name, radius) = match self {
            DensityVerdict::CertifiedDense => ("certified-dense", None),
            DensityVerdict::EvidenceDense(r) => ("evidence-dense", Some(r.to_string())),
            DensityVerdict::EvidenceSparse => ("evidence-sparse", None),
            DensityVerdict::Inconclusive => ("inconclusive", None),
        };
        let mut st = s.serialize_struct("DensityVerdict", 2)?;
        st.serialize_field("verdict", name)?;
        st.serialize_field("radius", &radius)?;
        st.end()
    }
}

/// Decide relative density: a certificate that the origin is interior to
/// the attractor settles it; otherwise measure covering radii over the
/// regions beta^n times the unit domain and report the trend.
pub fn density_test(
    ps: &PlaceSystem,
    digits: &[FieldElement],
    budget: &SearchBudget,
    prec: PrecCtx,
) -> Result<DensityVerdict> {
    if !ps.unit_arch().is_empty() {
        return Err(CoreError::UnitCirclePlacePresent);
    }
    match origin_interior_certificate(ps, digits, budget, prec)? {
        InteriorOutcome::Certified(_) => Ok(DensityVerdict::CertifiedDense),
        InteriorOutcome::NotFound { one_sided: true, .. } => Ok(DensityVerdict::EvidenceSparse),
        InteriorOutcome::NotFound { .. } => {
            if !ps.finite_places().is_empty() {
                // the covering trend only reads the archimedean factor, which
                // says nothing for a rational base
                return Ok(DensityVerdict::Inconclusive);
            }
            // covering radius trend over growing levels
            let mut radii: Vec<Rational> = Vec::new();
            let levels = [3u32, 5u32];
            for &n in &levels {
                let level = enumerate_spectrum(ps, digits, n, None, budget.max_points)?;
                let (_, factor) =
                    ps.beta_abs_bounds(&ps.distinguished_place(), 96)?;
                let mut scale = Rational::one();
                for _ in 0..=n {
                    scale *= &factor;
                }
                let region = Region::scaled_domain(ps, &scale);
                let (_, ub) = covering_radius(ps, &level, &region, prec)?;
                radii.push(ub);
            }
            let grow = &radii[1] * rat(4, 5);
            if grow <= radii[0] {
                Ok(DensityVerdict::EvidenceDense(radii[1].clone()))
            } else {
                Ok(DensityVerdict::Inconclusive)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    fn system(coeffs: &[i64]) -> PlaceSystem {
        let field = NumberField::new(IntPoly::from_i64(coeffs), PrecCtx::default()).unwrap();
        PlaceSystem::new(field, PrecCtx::default()).unwrap()
    }

    fn ints(ps: &PlaceSystem, range: std::ops::RangeInclusive<i64>) -> Vec<FieldElement> {
        range.map(|i| ps.field().from_int(i)).collect()
    }

    #[test]
    fn binary_level_two_is_zero_to_seven() {
        let ps = system(&[-2, 1]);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, 0..=1), 2, None, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(level.len(), 8);
        let vals: Vec<i64> = (0..8)
            .map(|i| level.element(i).to_rational().unwrap().to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(vals, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn golden_level_one_has_four_points() {
        let ps = system(&[-1, -1, 1]);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, 0..=1), 1, None, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(level.len(), 4);
    }

    #[test]
    fn symmetric_binary_level_one() {
        let ps = system(&[-2, 1]);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, -1..=1), 1, None, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(level.len(), 7); // {-3..3}
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let ps = system(&[-1, -1, 1]);
        let digits = ints(&ps, 0..=1);
        for n in 0..=5u32 {
            let level =
                enumerate_spectrum(&ps, &digits, n, None, DEFAULT_MAX_POINTS).unwrap();
            // brute force: all coefficient tuples
            let mut set = HashSet::new();
            let count = digits.len().pow(n + 1);
            for mask in 0..count {
                let mut m = mask;
                let mut acc = ps.field().zero();
                for _ in 0..=n {
                    let a = &digits[m % digits.len()];
                    m /= digits.len();
                    acc = acc.mul_beta().add(a);
                }
                set.insert(acc);
            }
            assert_eq!(level.len(), set.len(), "level {}", n);
            for x in &set {
                assert!(level.contains(x));
            }
        }
    }

    #[test]
    fn monotone_in_n_with_zero_digit() {
        let ps = system(&[-1, -1, 1]);
        let digits = ints(&ps, 0..=1);
        let small = enumerate_spectrum(&ps, &digits, 3, None, DEFAULT_MAX_POINTS).unwrap();
        let big = enumerate_spectrum(&ps, &digits, 4, None, DEFAULT_MAX_POINTS).unwrap();
        for i in 0..small.len() {
            assert!(big.contains(&small.element(i)));
        }
    }

    #[test]
    fn binary_separation_bound_is_one() {
        let ps = system(&[-2, 1]);
        let b = separation_bound(&ps, &ints(&ps, 0..=1)).unwrap();
        assert_eq!(b, Rational::one());
    }

    #[test]
    fn golden_separation_bound_near_the_conjugate_series() {
        let ps = system(&[-1, -1, 1]);
        let b = separation_bound(&ps, &ints(&ps, 0..=1)).unwrap();
        let f = b.to_f64().unwrap();
        assert!(f > 0.37 && f < 0.382, "bound {}", f);
    }

    #[test]
    fn binary_min_gap_is_one() {
        let ps = system(&[-2, 1]);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, 0..=1), 3, None, DEFAULT_MAX_POINTS).unwrap();
        let (lb, ub) = min_gap(&ps, &level, PrecCtx::default()).unwrap();
        assert_eq!(lb, Rational::one());
        assert_eq!(ub, Rational::one());
    }

    #[test]
    fn golden_min_gap_beats_the_bound() {
        let ps = system(&[-1, -1, 1]);
        let digits = ints(&ps, 0..=1);
        let level = enumerate_spectrum(&ps, &digits, 4, None, DEFAULT_MAX_POINTS).unwrap();
        let (lb, ub) = min_gap(&ps, &level, PrecCtx::default()).unwrap();
        let bound = separation_bound(&ps, &digits).unwrap();
        assert!(lb >= bound, "lb {} bound {}", lb, bound);
        // the nearest admissible difference is phi - 1 = 0.6180...;
        // anything closer would need a conjugate value past the digit
        // series bound
        let u = ub.to_f64().unwrap();
        assert!(u > 0.617 && u < 0.619, "ub {}", u);
    }

    #[test]
    fn gap_needs_two_points() {
        let ps = system(&[-2, 1]);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, 0..=0), 3, None, DEFAULT_MAX_POINTS).unwrap();
        assert!(min_gap(&ps, &level, PrecCtx::default()).is_err());
    }

    #[test]
    fn rational_base_min_gap_counts_the_finite_place() {
        let ps = system(&[-3, 2]); // beta = 3/2
        let digits: Vec<FieldElement> =
            (0..=2).map(|i| ps.field().from_int(i)).collect();
        let level = enumerate_spectrum(&ps, &digits, 1, None, DEFAULT_MAX_POINTS).unwrap();
        let (lb, _) = min_gap(&ps, &level, PrecCtx::default()).unwrap();
        // 1 and 3/2 are 1/2 apart on the line but 2 apart 2-adically
        assert!(lb >= Rational::one(), "lb {}", lb);
        let bound = separation_bound(&ps, &digits).unwrap();
        assert!(lb >= bound);
    }

    #[test]
    fn covering_radius_of_binary_integers() {
        let ps = system(&[-2, 1]);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, 0..=1), 3, None, DEFAULT_MAX_POINTS).unwrap();
        let region = Region::interval(Rational::zero(), rat(8, 1));
        let (lb, ub) = covering_radius(&ps, &level, &region, PrecCtx::default()).unwrap();
        assert_eq!(lb, rat(1, 2));
        assert_eq!(ub, rat(1, 2));
    }

    #[test]
    fn covering_radius_with_gaps() {
        let ps = system(&[-2, 1]);
        let digits = vec![ps.field().from_int(0), ps.field().from_int(2)];
        let level = enumerate_spectrum(&ps, &digits, 2, None, DEFAULT_MAX_POINTS).unwrap();
        let region = Region::interval(Rational::zero(), rat(7, 1));
        let (lb, ub) = covering_radius(&ps, &level, &region, PrecCtx::default()).unwrap();
        assert_eq!(lb, Rational::one());
        assert_eq!(ub, Rational::one());
    }

    #[test]
    fn sub_region_never_needs_more() {
        let ps = system(&[-2, 1]);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, -1..=1), 3, None, DEFAULT_MAX_POINTS).unwrap();
        let big = Region::interval(rat(-8, 1), rat(8, 1));
        let small = Region::interval(rat(-2, 1), rat(3, 1));
        let (_, big_ub) = covering_radius(&ps, &level, &big, PrecCtx::default()).unwrap();
        let (_, small_ub) = covering_radius(&ps, &level, &small, PrecCtx::default()).unwrap();
        assert!(small_ub <= big_ub);
    }

    #[test]
    fn budget_cap_is_reported() {
        let ps = system(&[-2, 1]);
        let err = enumerate_spectrum(&ps, &ints(&ps, -1..=1), 20, None, 1000).unwrap_err();
        assert!(matches!(err, CoreError::MemoryBudgetExceeded(_)));
    }

    #[test]
    fn pruning_counts_dropped_points() {
        let ps = system(&[-2, 1]);
        let r = rat(3, 1);
        let level =
            enumerate_spectrum(&ps, &ints(&ps, 0..=1), 3, Some(&r), DEFAULT_MAX_POINTS).unwrap();
        // {0..15} pruned to {0..3}
        assert_eq!(level.len(), 4);
        assert!(level.pruned > 0);
    }

    #[test]
    fn density_binary_symmetric_is_certified() {
        let ps = system(&[-2, 1]);
        let v = density_test(&ps, &ints(&ps, -1..=1), &SearchBudget::default(), PrecCtx::default())
            .unwrap();
        assert_eq!(v, DensityVerdict::CertifiedDense);
    }

    #[test]
    fn density_binary_nonnegative_is_sparse() {
        let ps = system(&[-2, 1]);
        let v = density_test(&ps, &ints(&ps, 0..=1), &SearchBudget::default(), PrecCtx::default())
            .unwrap();
        assert_eq!(v, DensityVerdict::EvidenceSparse);
    }

    #[test]
    fn density_refuses_unit_circle_conjugates() {
        let ps = system(&[1, -1, -1, -1, 1]);
        let err =
            density_test(&ps, &ints(&ps, -2..=2), &SearchBudget::default(), PrecCtx::default())
                .unwrap_err();
        assert!(matches!(err, CoreError::UnitCirclePlacePresent));
    }
}
