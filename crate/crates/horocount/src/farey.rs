//! Enumeration and exact counting of horoball tangent points.
//!
//! Tangent points of the orbit of the base horoball are the reduced fractions
//! `p/q` (modular group) and the reduced Gaussian fractions with canonical
//! denominator (Picard group); the horoball at `p/q` has Euclidean diameter
//! `1/N(q)`. This module enumerates and counts tangent points by denominator
//! norm directly, without walking the group.
//!
//! Counting is exact integer arithmetic throughout. Per-denominator counts in
//! an interval use the divisor-sum form of inclusion-exclusion over the
//! squarefree divisors of `q`; disks in the Gaussian case are counted row by
//! row with integer square roots. Global counts over a fundamental window
//! `[0,1)^d` use Euler's totient and its Gaussian analogue.

use std::collections::{HashMap, HashSet};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Gint, Grat, Rat};
use crate::error::{Error, Result};
use crate::moebius::PresetName;

/// Largest supported denominator norm. Beyond this, `1/N(q)` underflows the
/// scales the experiments run at and intermediate products would need care.
pub const MAX_DENOMINATOR_NORM: u64 = 1 << 62;

/// Half-open range of denominator norms `(norm_min, norm_max]`.
///
/// For the modular group the norm of a denominator `q >= 1` is `q^2`, so the
/// range `(64, 121]` selects `q` in `{9, 10, 11}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenominatorRange {
    pub norm_min: u64,
    pub norm_max: u64,
}

impl DenominatorRange {
    pub fn new(norm_min: u64, norm_max: u64) -> Result<Self> {
        if norm_max > MAX_DENOMINATOR_NORM {
            return Err(Error::InvalidQuery(format!(
                "denominator norm bound {norm_max} exceeds {MAX_DENOMINATOR_NORM}"
            )));
        }
        Ok(DenominatorRange { norm_min, norm_max })
    }

    /// All norms up to and including `norm_max`.
    pub fn up_to(norm_max: u64) -> Result<Self> {
        Self::new(0, norm_max)
    }

    /// Denominators whose horoball diameter `1/N(q)` is at least `min_diam`.
    pub fn for_min_diameter(min_diam: &Rat) -> Result<Self> {
        if !min_diam.is_positive() {
            return Err(Error::InvalidQuery(
                "minimum diameter must be positive".into(),
            ));
        }
        let bound = min_diam.recip().floor().to_integer();
        let norm_max = bound.to_u64().ok_or_else(|| {
            Error::InvalidQuery(format!(
                "minimum diameter {min_diam} needs norms beyond {MAX_DENOMINATOR_NORM}"
            ))
        })?;
        Self::new(0, norm_max)
    }

    pub fn contains_norm(&self, n: u64) -> bool {
        n > self.norm_min && n <= self.norm_max
    }

    pub fn is_empty(&self) -> bool {
        self.norm_max <= self.norm_min
    }
}

/// Closed window on the boundary: an interval for the modular group, an
/// axis-aligned box for the Picard group.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    Interval { lo: Rat, hi: Rat },
    Box { x: (Rat, Rat), y: (Rat, Rat) },
}

impl Window {
    pub fn interval(lo: Rat, hi: Rat) -> Self {
        Window::Interval { lo, hi }
    }

    pub fn rect(x0: Rat, x1: Rat, y0: Rat, y1: Rat) -> Self {
        Window::Box { x: (x0, x1), y: (y0, y1) }
    }

    /// `[0, 1]` or `[0, 1]^2` depending on the preset.
    pub fn unit(preset: PresetName) -> Self {
        let (z, o) = (Rat::zero(), Rat::one());
        match preset {
            PresetName::Modular => Window::interval(z, o),
            PresetName::Picard => Window::rect(z.clone(), o.clone(), z, o),
        }
    }

    pub fn contains(&self, z: &Grat) -> bool {
        match self {
            Window::Interval { lo, hi } => match z.as_real() {
                Some(x) => &x >= lo && &x <= hi,
                None => false,
            },
            Window::Box { x, y } => {
                let (re, im) = (z.re(), z.im());
                re >= x.0 && re <= x.1 && im >= y.0 && im <= y.1
            }
        }
    }

    fn matches(&self, preset: PresetName) -> Result<()> {
        let ok = matches!(
            (self, preset),
            (Window::Interval { .. }, PresetName::Modular)
                | (Window::Box { .. }, PresetName::Picard)
        );
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidQuery(format!(
                "window kind does not match the {preset} preset"
            )))
        }
    }
}

/// Modular denominators `q` with `q^2` in the range, ascending.
pub(crate) fn modular_denominators(range: &DenominatorRange) -> impl Iterator<Item = u64> {
    let lo = range.norm_min.sqrt() + 1;
    let hi = range.norm_max.sqrt();
    lo..=hi
}

/// Canonical Gaussian denominators with norm in the range, sorted by
/// `(norm, re)` for deterministic iteration order.
pub(crate) fn canonical_gaussian_denominators(range: &DenominatorRange) -> Vec<Gint> {
    let mut out = Vec::new();
    let re_max = range.norm_max.sqrt();
    for re in 1..=re_max {
        let re2 = re * re;
        let im_max = (range.norm_max - re2).sqrt();
        for im in 0..=im_max {
            let n = re2 + im * im;
            if range.contains_norm(n) {
                out.push((n, re, im));
            }
        }
    }
    out.sort_unstable();
    out.into_iter()
        .map(|(_, re, im)| Gint::new(re as i64, im as i64))
        .collect()
}

/// Enumerates tangent points in the window with denominator norm in the
/// range, sorted by value (real part, then imaginary part).
pub fn enumerate_tangents(
    preset: PresetName,
    window: &Window,
    range: &DenominatorRange,
) -> Result<Vec<Grat>> {
    window.matches(preset)?;
    let mut out = Vec::new();
    match window {
        Window::Interval { lo, hi } => {
            for q in modular_denominators(range) {
                let qr = Rat::from_integer(q.into());
                let a = (&qr * lo).ceil().to_integer();
                let b = (&qr * hi).floor().to_integer();
                let mut p = a;
                while p <= b {
                    if p.gcd(&BigInt::from(q)).is_one() {
                        out.push(Grat::new(Gint::from_int(p.clone()), Gint::from_int(q)));
                    }
                    p += 1;
                }
            }
        }
        Window::Box { x, y } => {
            let prepared = if range.norm_max <= PREPARED_BOX_NORM_CAP {
                PreparedBox::try_new(x, y)
            } else {
                None
            };
            for q in canonical_gaussian_denominators(range) {
                match &prepared {
                    Some(pb) => {
                        let re = q.re.to_i128().expect("norm-capped component");
                        let im = q.im.to_i128().expect("norm-capped component");
                        gaussian_tangents_prepared(&q, re, im, pb, &mut out);
                    }
                    None => gaussian_tangents_for_denominator(&q, window, &mut out),
                }
            }
        }
    }
    out.sort_unstable_by(|a, b| a.cmp_value(b));
    Ok(out)
}

/// Integer points `p` with `p/q` in the box and `gcd(p, q)` a unit.
fn gaussian_tangents_for_denominator(q: &Gint, window: &Window, out: &mut Vec<Grat>) {
    let Window::Box { x, y } = window else { unreachable!() };
    // p must lie in q * Box; scan the bounding box of the rotated corners.
    let corners = [
        Grat::from_parts(&x.0, &y.0),
        Grat::from_parts(&x.0, &y.1),
        Grat::from_parts(&x.1, &y.0),
        Grat::from_parts(&x.1, &y.1),
    ];
    let qg = Grat::from_gint(q.clone());
    let images: Vec<(Rat, Rat)> = corners
        .iter()
        .map(|c| {
            let w = c * &qg;
            (w.re(), w.im())
        })
        .collect();
    let re_lo = images.iter().map(|(r, _)| r).min().unwrap().ceil().to_integer();
    let re_hi = images.iter().map(|(r, _)| r).max().unwrap().floor().to_integer();
    let im_lo = images.iter().map(|(_, i)| i).min().unwrap().ceil().to_integer();
    let im_hi = images.iter().map(|(_, i)| i).max().unwrap().floor().to_integer();

    let nq = q.norm();
    let mut re = re_lo;
    while re <= re_hi {
        let mut im = im_lo.clone();
        while im <= im_hi {
            let p = Gint::new(re.clone(), im.clone());
            // Exact membership: Re(p conj(q)) / N(q) in [x0, x1], same for Im.
            let w = &p * &q.conj();
            let zr = Rat::new(w.re, nq.clone());
            let zi = Rat::new(w.im, nq.clone());
            if zr >= x.0 && zr <= x.1 && zi >= y.0 && zi <= y.1 && p.gcd(q).is_unit() {
                out.push(Grat::new(p, q.clone()));
            }
            im += 1;
        }
        re += 1;
    }
}

/// Box bounds scaled to one `i128` denominator for the hot Gaussian
/// enumeration path: `x` spans `[x0/b, x1/b]`, `y` spans `[y0/b, y1/b]`.
/// With the caps here and denominator norms at most `2^24`, every product
/// in `gaussian_tangents_prepared` stays far from `i128` range.
#[derive(Clone, Copy, Debug)]
struct PreparedBox {
    b: i128,
    x0: i128,
    x1: i128,
    y0: i128,
    y1: i128,
}

const PREPARED_BOX_CAP: i128 = 1 << 40;
const PREPARED_BOX_NORM_CAP: u64 = 1 << 24;

impl PreparedBox {
    fn try_new(x: &(Rat, Rat), y: &(Rat, Rat)) -> Option<Self> {
        let b_big = x.0.denom().lcm(x.1.denom()).lcm(&y.0.denom().lcm(y.1.denom()));
        let b = b_big.to_i128().filter(|v| *v < PREPARED_BOX_CAP)?;
        let scale = |r: &Rat| -> Option<i128> {
            let num = r.numer() * (&b_big / r.denom());
            num.to_i128().filter(|v| v.abs() < PREPARED_BOX_CAP)
        };
        Some(PreparedBox {
            b,
            x0: scale(&x.0)?,
            x1: scale(&x.1)?,
            y0: scale(&y.0)?,
            y1: scale(&y.1)?,
        })
    }
}

/// `gaussian_tangents_for_denominator` in machine words: the same corner
/// bounding box and the same closed-box membership test.
fn gaussian_tangents_prepared(
    q: &Gint,
    q_re: i128,
    q_im: i128,
    pb: &PreparedBox,
    out: &mut Vec<Grat>,
) {
    let nq = q_re * q_re + q_im * q_im;
    let (mut re_lo, mut re_hi) = (i128::MAX, i128::MIN);
    let (mut im_lo, mut im_hi) = (i128::MAX, i128::MIN);
    for (cx, cy) in [(pb.x0, pb.y0), (pb.x0, pb.y1), (pb.x1, pb.y0), (pb.x1, pb.y1)] {
        let re = cx * q_re - cy * q_im;
        let im = cx * q_im + cy * q_re;
        re_lo = re_lo.min(re);
        re_hi = re_hi.max(re);
        im_lo = im_lo.min(im);
        im_hi = im_hi.max(im);
    }
    // ceil(a/b) = -floor(-a/b) for b > 0.
    let lo_re = -(-re_lo).div_euclid(pb.b);
    let hi_re = re_hi.div_euclid(pb.b);
    let lo_im = -(-im_lo).div_euclid(pb.b);
    let hi_im = im_hi.div_euclid(pb.b);
    let (xn0, xn1) = (pb.x0 * nq, pb.x1 * nq);
    let (yn0, yn1) = (pb.y0 * nq, pb.y1 * nq);
    for re in lo_re..=hi_re {
        for im in lo_im..=hi_im {
            let w_re = (re * q_re + im * q_im) * pb.b;
            let w_im = (im * q_re - re * q_im) * pb.b;
            if w_re < xn0 || w_re > xn1 || w_im < yn0 || w_im > yn1 {
                continue;
            }
            let p = Gint::new(re, im);
            if p.gcd(q).is_unit() {
                out.push(Grat::new(p, q.clone()));
            }
        }
    }
}

/// Brute-force reference enumeration: every numerator/denominator pair is
/// reduced independently and filtered, with no coprimality stepping. Slow;
/// used to cross-check `enumerate_tangents`.
pub fn sieve_tangents(
    preset: PresetName,
    window: &Window,
    range: &DenominatorRange,
) -> Result<Vec<Grat>> {
    window.matches(preset)?;
    let mut seen: HashSet<Grat> = HashSet::new();
    match window {
        Window::Interval { lo, hi } => {
            for q in 1..=range.norm_max.sqrt() {
                let qr = Rat::from_integer(q.into());
                let a = (&qr * lo).ceil().to_integer();
                let b = (&qr * hi).floor().to_integer();
                let mut p = a;
                while p <= b {
                    let z = BigRational::new(p.clone(), q.into());
                    let den_norm = z.denom() * z.denom();
                    if let Some(n) = den_norm.to_u64() {
                        if range.contains_norm(n) {
                            seen.insert(Grat::from_rat(&z));
                        }
                    }
                    p += 1;
                }
            }
        }
        Window::Box { .. } => {
            let all = DenominatorRange::up_to(range.norm_max)?;
            for q in canonical_gaussian_denominators(&all) {
                let mut candidates = Vec::new();
                gaussian_lattice_candidates(&q, window, &mut candidates);
                for p in candidates {
                    let z = Grat::new(p, q.clone());
                    if let Some(n) = z.den_norm().to_u64() {
                        if range.contains_norm(n) && window.contains(&z) {
                            seen.insert(z);
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<Grat> = seen.into_iter().collect();
    out.sort_unstable_by(|a, b| a.cmp_value(b));
    Ok(out)
}

/// All integer `p` in the bounding box of `q * Box` whose quotient lies in
/// the box, with no coprimality filter.
fn gaussian_lattice_candidates(q: &Gint, window: &Window, out: &mut Vec<Gint>) {
    let Window::Box { x, y } = window else { unreachable!() };
    let corners = [
        Grat::from_parts(&x.0, &y.0),
        Grat::from_parts(&x.0, &y.1),
        Grat::from_parts(&x.1, &y.0),
        Grat::from_parts(&x.1, &y.1),
    ];
    let qg = Grat::from_gint(q.clone());
    let images: Vec<(Rat, Rat)> = corners
        .iter()
        .map(|c| {
            let w = c * &qg;
            (w.re(), w.im())
        })
        .collect();
    let re_lo = images.iter().map(|(r, _)| r).min().unwrap().ceil().to_integer();
    let re_hi = images.iter().map(|(r, _)| r).max().unwrap().floor().to_integer();
    let im_lo = images.iter().map(|(_, i)| i).min().unwrap().ceil().to_integer();
    let im_hi = images.iter().map(|(_, i)| i).max().unwrap().floor().to_integer();
    let nq = q.norm();
    let mut re = re_lo;
    while re <= re_hi {
        let mut im = im_lo.clone();
        while im <= im_hi {
            let p = Gint::new(re.clone(), im.clone());
            let w = &p * &q.conj();
            let zr = Rat::new(w.re, nq.clone());
            let zi = Rat::new(w.im, nq.clone());
            if zr >= x.0 && zr <= x.1 && zi >= y.0 && zi <= y.1 {
                out.push(p);
            }
            im += 1;
        }
        re += 1;
    }
}

/// The ascending Farey sequence of order `qmax` on `[0, 1]`, generated by
/// mediant stepping. Independent of the per-denominator enumeration; used as
/// an oracle.
pub fn farey_walk_unit_interval(qmax: u64) -> Vec<Rat> {
    assert!(qmax >= 1);
    let n = qmax as i64;
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    let mut out = vec![Rat::new(0.into(), 1.into())];
    loop {
        let k = (n + b) / d;
        let (a2, b2) = (c, d);
        let (c2, d2) = (k * c - a, k * d - b);
        a = a2;
        b = b2;
        c = c2;
        d = d2;
        out.push(Rat::new(a.into(), b.into()));
        if a == 1 && b == 1 {
            return out;
        }
    }
}

/// Counts tangent points in the window with denominator norm in the range.
/// Intervals use the exact divisor-sum kernel; boxes enumerate.
pub fn count_tangents(
    preset: PresetName,
    window: &Window,
    range: &DenominatorRange,
) -> Result<BigInt> {
    window.matches(preset)?;
    match window {
        Window::Interval { lo, hi } => {
            let mut total = BigInt::zero();
            for q in modular_denominators(range) {
                total += count_in_interval(q, lo, hi);
            }
            Ok(total)
        }
        Window::Box { x, y } => {
            let mut total = BigInt::zero();
            for q in canonical_gaussian_denominators(range) {
                total += count_in_box(&q, x, y);
            }
            Ok(total)
        }
    }
}

/// Number of tangent points within distance `r` of `z`: a closed interval for
/// the modular group, a closed disk for the Picard group.
pub fn count_in_ball(
    preset: PresetName,
    z: &Grat,
    r: &Rat,
    range: &DenominatorRange,
) -> Result<BigInt> {
    if r.is_negative() {
        return Err(Error::InvalidQuery("ball radius must be nonnegative".into()));
    }
    match preset {
        PresetName::Modular => {
            if !z.is_real() {
                return Err(Error::InvalidQuery(
                    "modular ball center must be real".into(),
                ));
            }
            let zr = z.re();
            let lo = &zr - r;
            let hi = &zr + r;
            let prepared = PreparedInterval::try_new(&lo, &hi);
            let mut total = BigInt::zero();
            for q in modular_denominators(range) {
                match prepared {
                    Some(ref iv) if q <= 1 << 21 => {
                        total += count_in_interval_prepared(q, iv);
                    }
                    _ => total += count_in_interval(q, &lo, &hi),
                }
            }
            Ok(total)
        }
        PresetName::Picard => {
            let r2 = r * r;
            let mut total = BigInt::zero();
            for q in canonical_gaussian_denominators(range) {
                total += count_in_disk(&q, z, &r2);
            }
            Ok(total)
        }
    }
}

/// Interval endpoints reduced to `i128` fractions for the hot counting path.
/// Valid whenever numerators, denominators, and `q * numerator` products stay
/// far from `i128` range; `try_new` enforces the bounds.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PreparedInterval {
    lo_n: i128,
    lo_d: i128,
    hi_n: i128,
    hi_d: i128,
}

impl PreparedInterval {
    /// Safe up to `q <= 2^21` given the magnitude caps checked here.
    pub(crate) fn try_new(lo: &Rat, hi: &Rat) -> Option<Self> {
        const CAP: i128 = 1 << 100;
        let c = |x: &BigInt| x.to_i128().filter(|v| v.abs() < CAP);
        Some(PreparedInterval {
            lo_n: c(lo.numer())?,
            lo_d: c(lo.denom())?,
            hi_n: c(hi.numer())?,
            hi_d: c(hi.denom())?,
        })
    }
}

/// `count_in_interval` on prepared endpoints, pure machine arithmetic.
pub(crate) fn count_in_interval_prepared(q: u64, iv: &PreparedInterval) -> i64 {
    debug_assert!(q <= 1 << 21);
    let q = q as i128;
    // ceil(a/b) = -floor(-a/b) for b > 0.
    let a = -(-q * iv.lo_n).div_euclid(iv.lo_d);
    let b = (q * iv.hi_n).div_euclid(iv.hi_d);
    if b < a {
        return 0;
    }
    let (a, b) = (a as i64, b as i64);
    let mut total = 0i64;
    for (d, mu) in squarefree_divisors_mu(q as u64) {
        let d = d as i64;
        total += mu as i64 * (b.div_euclid(d) - (a - 1).div_euclid(d));
    }
    total
}

/// Number of integers `p` in `[ceil(q lo), floor(q hi)]` coprime to `q`,
/// by inclusion-exclusion over the squarefree divisors of `q`.
pub fn count_in_interval(q: u64, lo: &Rat, hi: &Rat) -> BigInt {
    let qr = Rat::from_integer(q.into());
    let a = (&qr * lo).ceil().to_integer();
    let b = (&qr * hi).floor().to_integer();
    if b < a {
        return BigInt::zero();
    }
    if let (Some(a), Some(b)) = (a.to_i64(), b.to_i64()) {
        let mut total = 0i64;
        for (d, mu) in squarefree_divisors_mu(q) {
            let d = d as i64;
            total += mu as i64 * (b.div_euclid(d) - (a - 1).div_euclid(d));
        }
        return total.into();
    }
    let a1: BigInt = a - 1;
    let mut total = BigInt::zero();
    for (d, mu) in squarefree_divisors_mu(q) {
        let d = BigInt::from(d);
        total += mu * (b.div_floor(&d) - a1.div_floor(&d));
    }
    total
}

/// Number of Gaussian integers `p` coprime to `q` with `|p/q - center|^2`
/// at most `r2`.
pub fn count_in_disk(q: &Gint, center: &Grat, r2: &Rat) -> BigInt {
    let nq = Rat::from_integer(q.norm());
    let scaled_center = center * &Grat::from_gint(q.clone());
    let scaled_r2 = r2 * &nq;
    let mut total = BigInt::zero();
    for (d, mu) in gaussian_squarefree_divisors_mu(q) {
        let sub_center = &scaled_center * &Grat::new(Gint::one(), d.clone());
        let sub_r2 = &scaled_r2 / Rat::from_integer(d.norm());
        total += mu * gaussian_disk_lattice_count(&sub_center, &sub_r2);
    }
    total
}

/// Number of Gaussian integers in the closed disk `|w - center|^2 <= r2`,
/// counted row by row with integer square roots.
pub fn gaussian_disk_lattice_count(center: &Grat, r2: &Rat) -> BigInt {
    if r2.is_negative() {
        return BigInt::zero();
    }
    // Scale by the common denominator b: a lattice point (x, y) is inside
    // exactly when (x b - X)^2 + (y b - Y)^2 <= floor(r2 b^2), an all-integer
    // test. Rows then need only multiply/sqrt, no rational normalization.
    let cx = center.re();
    let cy = center.im();
    let b: BigInt = cx.denom().lcm(cy.denom());
    let x = cx.numer() * &b / cx.denom();
    let y = cy.numer() * &b / cy.denom();
    let w = (r2 * Rat::from_integer(&b * &b)).floor().to_integer();
    if w.is_negative() {
        return BigInt::zero();
    }
    if let (Some(bb), Some(xx), Some(yy), Some(ww)) =
        (b.to_i128(), x.to_i128(), y.to_i128(), w.to_u128())
    {
        // (isqrt(w) + b)^2 must stay inside i128 for the row arithmetic.
        if bb < (1 << 62)
            && ww < (1 << 124)
            && xx.unsigned_abs() < (1 << 100)
            && yy.unsigned_abs() < (1 << 100)
        {
            return BigInt::from(disk_rows_i128(bb, xx, yy, ww));
        }
    }
    let m = w.sqrt();
    let y_hi = (&y + &m).div_floor(&b);
    let mut row = (&y - &m).div_ceil(&b);
    let mut total = BigInt::zero();
    while row <= y_hi {
        let dy = &row * &b - &y;
        let rem = &w - &dy * &dy;
        if !rem.is_negative() {
            let t = rem.sqrt();
            let lo = (&x - &t).div_ceil(&b);
            let hi = (&x + &t).div_floor(&b);
            if hi >= lo {
                total += hi - lo + BigInt::one();
            }
        }
        row += 1;
    }
    total
}

fn u128_isqrt(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u128;
    if r == 0 {
        r = 1;
    }
    r = (r + n / r) >> 1;
    r = (r + n / r) >> 1;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

fn disk_rows_i128(b: i128, x: i128, y: i128, w: u128) -> i128 {
    let m = u128_isqrt(w) as i128;
    let div_floor = |a: i128| a.div_euclid(b);
    let div_ceil = |a: i128| -(-a).div_euclid(b);
    let y_hi = div_floor(y + m);
    let mut row = div_ceil(y - m);
    let mut total = 0i128;
    while row <= y_hi {
        let dy = (row * b - y).unsigned_abs();
        let sq = dy * dy;
        if sq <= w {
            let t = u128_isqrt(w - sq) as i128;
            let lo = div_ceil(x - t);
            let hi = div_floor(x + t);
            if hi >= lo {
                total += hi - lo + 1;
            }
        }
        row += 1;
    }
    total
}

/// Number of Gaussian integers `p` coprime to `q` with `p/q` in the closed
/// box `x.0 <= Re <= x.1`, `y.0 <= Im <= y.1`.
pub fn count_in_box(q: &Gint, x: &(Rat, Rat), y: &(Rat, Rat)) -> BigInt {
    let mut total = BigInt::zero();
    for (d, mu) in gaussian_squarefree_divisors_mu(q) {
        let scale = q.div_exact(&d);
        total += mu * gaussian_box_lattice_count(&scale, x, y);
    }
    total
}

/// Number of Gaussian integers in `q * B` where `B` is the closed box with
/// the given coordinate ranges. The image is a rotated rectangle; rows are
/// scanned and each row's segment endpoints come from exact edge
/// intersections.
pub fn gaussian_box_lattice_count(q: &Gint, x: &(Rat, Rat), y: &(Rat, Rat)) -> BigInt {
    if x.0 > x.1 || y.0 > y.1 {
        return BigInt::zero();
    }
    let qa = Rat::from_integer(q.re.clone());
    let qb = Rat::from_integer(q.im.clone());
    let corner = |vx: &Rat, vy: &Rat| (&qa * vx - &qb * vy, &qa * vy + &qb * vx);
    let vs = [
        corner(&x.0, &y.0),
        corner(&x.1, &y.0),
        corner(&x.1, &y.1),
        corner(&x.0, &y.1),
    ];
    let y_lo = vs.iter().map(|v| &v.1).min().unwrap().ceil().to_integer();
    let y_hi = vs.iter().map(|v| &v.1).max().unwrap().floor().to_integer();
    let mut total = BigInt::zero();
    let mut row = y_lo;
    while row <= y_hi {
        let ry = Rat::from_integer(row.clone());
        let mut x_min: Option<Rat> = None;
        let mut x_max: Option<Rat> = None;
        let mut push = |xv: Rat| {
            if x_min.as_ref().is_none_or(|m| xv < *m) {
                x_min = Some(xv.clone());
            }
            if x_max.as_ref().is_none_or(|m| xv > *m) {
                x_max = Some(xv);
            }
        };
        for i in 0..4 {
            let (px, py) = &vs[i];
            let (qx, qy) = &vs[(i + 1) % 4];
            if py == qy {
                if *py == ry {
                    push(px.clone());
                    push(qx.clone());
                }
            } else if (py <= &ry && &ry <= qy) || (qy <= &ry && &ry <= py) {
                let t = (&ry - py) / (qy - py);
                push(px + (qx - px) * t);
            }
        }
        if let (Some(lo), Some(hi)) = (x_min, x_max) {
            let a = lo.ceil().to_integer();
            let b = hi.floor().to_integer();
            if a <= b {
                total += b - a + 1;
            }
        }
        row += 1;
    }
    total
}

/// Exact count of tangent points with denominator norm in the range over a
/// fundamental window `[0, 1)^d`, via totients: each denominator `q`
/// contributes exactly `phi(q)` reduced fractions there.
pub fn global_tangent_count(preset: PresetName, range: &DenominatorRange) -> BigInt {
    match preset {
        PresetName::Modular => {
            let mut total = BigInt::zero();
            for q in modular_denominators(range) {
                total += totient(q);
            }
            total
        }
        PresetName::Picard => {
            let mut total = BigInt::zero();
            for q in canonical_gaussian_denominators(range) {
                total += gaussian_totient(&q);
            }
            total
        }
    }
}

// ---------------------------------------------------------------------------
// Rational prime machinery: smallest-prime-factor sieve, shared and grown on
// demand.

static SPF: RwLock<Vec<u32>> = RwLock::new(Vec::new());

fn ensure_spf(n: u64) {
    let n = n.max(2) as usize;
    {
        let spf = SPF.read().unwrap();
        if spf.len() > n {
            return;
        }
    }
    let mut spf = SPF.write().unwrap();
    if spf.len() > n {
        return;
    }
    let limit = (n + 1).next_power_of_two().max(1 << 10);
    assert!(limit <= 1 << 31, "prime sieve request too large: {n}");
    let mut v = vec![0u32; limit];
    for i in 2..limit {
        if v[i] == 0 {
            for j in (i..limit).step_by(i) {
                if v[j] == 0 {
                    v[j] = i as u32;
                }
            }
        }
    }
    *spf = v;
}

/// Prime factorization of `n >= 1` as `(prime, exponent)` pairs, ascending.
pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    ensure_spf(n);
    let spf = SPF.read().unwrap();
    let mut out = Vec::new();
    let mut m = n as usize;
    while m > 1 {
        let p = spf[m] as usize;
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        out.push((p as u64, e));
    }
    out
}

/// Squarefree divisors of `n` with their Moebius values.
pub fn squarefree_divisors_mu(n: u64) -> Vec<(u64, i32)> {
    let mut out = vec![(1u64, 1i32)];
    for (p, _) in factorize_u64(n) {
        let len = out.len();
        for i in 0..len {
            let (d, mu) = out[i];
            out.push((d * p, -mu));
        }
    }
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut t = n;
    for (p, _) in factorize_u64(n) {
        t = t / p * (p - 1);
    }
    t
}

// ---------------------------------------------------------------------------
// Gaussian prime machinery.

/// A square root of -1 modulo a prime `p = 1 (mod 4)`, memoized.
fn sqrt_minus_one_mod(p: u64) -> u64 {
    static CACHE: RwLock<Option<HashMap<u64, u64>>> = RwLock::new(None);
    if let Some(cache) = CACHE.read().unwrap().as_ref() {
        if let Some(&r) = cache.get(&p) {
            return r;
        }
    }
    debug_assert_eq!(p % 4, 1);
    let pb = BigInt::from(p);
    let e = BigInt::from((p - 1) / 4);
    let mut r = 0;
    for a in 2u64.. {
        let t = BigInt::from(a).modpow(&e, &pb);
        let t2 = (&t * &t) % &pb;
        if t2 == &pb - 1 {
            r = t.to_u64().unwrap();
            break;
        }
    }
    CACHE
        .write()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(p, r);
    r
}

/// Factorization of a nonzero Gaussian integer into canonical Gaussian primes
/// with exponents (the unit part is dropped). Rational primes `p = 3 (mod 4)`
/// stay inert, `2` ramifies as `(1+i)^2`, and `p = 1 (mod 4)` splits into a
/// conjugate pair distinguished by exact division.
pub fn gaussian_factorize(q: &Gint) -> Vec<(Gint, u32)> {
    assert!(!q.is_zero(), "cannot factor zero");
    let n = q.norm().to_u64().expect("denominator norm fits u64");
    let mut out = Vec::new();
    for (p, e) in factorize_u64(n) {
        if p == 2 {
            out.push((Gint::new(1, 1), e));
        } else if p % 4 == 3 {
            debug_assert_eq!(e % 2, 0, "inert prime exponent in a norm is even");
            out.push((Gint::new(p as i64, 0), e / 2));
        } else {
            let r = sqrt_minus_one_mod(p);
            let pi = Gint::new(p as i64, 0).gcd(&Gint::new(r as i64, 1));
            debug_assert_eq!(pi.norm().to_u64(), Some(p));
            let mut k = 0u32;
            let mut m = q.clone();
            while let Some(next) = m.div_exact_checked(&pi) {
                m = next;
                k += 1;
            }
            if k > 0 {
                out.push((pi.clone(), k));
            }
            if e > k {
                out.push((pi.conj().canonical_associate().0, e - k));
            }
        }
    }
    out.sort_unstable_by_key(|(p, _)| (p.norm(), p.re.clone()));
    out
}

/// Squarefree Gaussian divisors of `q` (canonical representatives) with
/// Moebius values.
pub fn gaussian_squarefree_divisors_mu(q: &Gint) -> Vec<(Gint, i32)> {
    let mut out = vec![(Gint::one(), 1i32)];
    for (p, _) in gaussian_factorize(q) {
        let len = out.len();
        for i in 0..len {
            let (d, mu) = out[i].clone();
            out.push(((&d * &p).canonical_associate().0, -mu));
        }
    }
    out
}

/// Gaussian totient: the number of residues mod `q` coprime to `q`,
/// `N(q) prod (1 - 1/N(pi))` over the distinct prime divisors.
pub fn gaussian_totient(q: &Gint) -> BigInt {
    let mut t = q.norm();
    for (p, _) in gaussian_factorize(q) {
        let np = p.norm();
        t = &t / &np * (&np - 1);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_f64;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn grat(n: i64, d: i64) -> Grat {
        Grat::new(Gint::from_int(n), Gint::from_int(d))
    }

    fn rats(points: &[(i64, i64)]) -> Vec<Grat> {
        points.iter().map(|&(n, d)| grat(n, d)).collect()
    }

    #[test]
    fn gaussian_enumeration_paths_agree() {
        let windows = [
            Window::rect(rat(-1, 3), rat(1, 2), rat(-1, 4), rat(3, 5)),
            Window::rect(rat(31, 64), rat(33, 64), rat(31, 64), rat(33, 64)),
            Window::rect(rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1)),
            Window::rect(rat(-161, 113), rat(-160, 113), rat(7, 9), rat(8, 9)),
        ];
        for (i, window) in windows.iter().enumerate() {
            let range = DenominatorRange::up_to(400).unwrap();
            let fast = enumerate_tangents(PresetName::Picard, window, &range).unwrap();
            let mut slow = Vec::new();
            for q in canonical_gaussian_denominators(&range) {
                gaussian_tangents_for_denominator(&q, window, &mut slow);
            }
            slow.sort_unstable_by(|a, b| a.cmp_value(b));
            assert_eq!(fast, slow, "window {i}");
        }
    }

    #[test]
    fn enumerate_narrow_interval() {
        let w = Window::interval(rat(1, 3), rat(1, 2));
        let r = DenominatorRange::up_to(25).unwrap();
        let got = enumerate_tangents(PresetName::Modular, &w, &r).unwrap();
        assert_eq!(got, rats(&[(1, 3), (2, 5), (1, 2)]));
    }

    #[test]
    fn enumerate_unit_interval_low_order() {
        let w = Window::unit(PresetName::Modular);
        let r = DenominatorRange::up_to(25).unwrap();
        let got = enumerate_tangents(PresetName::Modular, &w, &r).unwrap();
        assert_eq!(got.len(), 11);
        assert_eq!(
            got,
            rats(&[
                (0, 1),
                (1, 5),
                (1, 4),
                (1, 3),
                (2, 5),
                (1, 2),
                (3, 5),
                (2, 3),
                (3, 4),
                (4, 5),
                (1, 1)
            ])
        );
    }

    #[test]
    fn box_lattice_count_rotated_square() {
        // q (1 + i)-scaled unit box for q = 2 + i has corners (0,0), (2,1),
        // (1,3), (-1,2); Pick: area 5, boundary 4, so 8 lattice points.
        let q = Gint::new(2, 1);
        let n = gaussian_box_lattice_count(&q, &(rat(0, 1), rat(1, 1)), &(rat(0, 1), rat(1, 1)));
        assert_eq!(n, BigInt::from(8));
        // Degenerate box: the segment from 0 to q.
        let seg = gaussian_box_lattice_count(&q, &(rat(0, 1), rat(1, 1)), &(rat(0, 1), rat(0, 1)));
        assert_eq!(seg, BigInt::from(2));
    }

    #[test]
    fn box_count_matches_enumeration() {
        let boxes = [
            ((rat(0, 1), rat(1, 1)), (rat(0, 1), rat(1, 1))),
            ((rat(-1, 3), rat(1, 2)), (rat(1, 5), rat(4, 5))),
            ((rat(2, 7), rat(2, 7)), (rat(0, 1), rat(1, 1))),
            ((rat(-5, 4), rat(-1, 4)), (rat(-3, 4), rat(1, 8))),
        ];
        for (x, y) in boxes {
            let w = Window::Box { x: x.clone(), y: y.clone() };
            let range = DenominatorRange::up_to(36).unwrap();
            let listed = enumerate_tangents(PresetName::Picard, &w, &range).unwrap();
            let counted = count_tangents(PresetName::Picard, &w, &range).unwrap();
            assert_eq!(BigInt::from(listed.len()), counted, "box {x:?} {y:?}");
        }
    }

    #[test]
    fn disk_lattice_paths_agree() {
        // Integer translation preserves the lattice count, and a shift of
        // 2^101 pushes the scaled center past the i128 guard, so the same
        // query runs through both code paths.
        let cases = [
            (Rat::new(3.into(), 7.into()), Rat::new((-2).into(), 5.into()), Rat::new(23.into(), 4.into())),
            (Rat::new(1.into(), 2.into()), Rat::zero(), Rat::new(1.into(), 4.into())),
            (Rat::zero(), Rat::zero(), Rat::from_integer(25.into())),
            (Rat::new((-5).into(), 3.into()), Rat::new(7.into(), 11.into()), Rat::new(999.into(), 10.into())),
        ];
        let shift: BigInt = BigInt::one() << 101;
        for (cx, cy, r2) in cases {
            let center = Grat::from_parts(&cx, &cy);
            let fast = gaussian_disk_lattice_count(&center, &r2);

            let far = Grat::from_parts(&(&cx + Rat::from_integer(shift.clone())), &cy);
            assert_eq!(fast, gaussian_disk_lattice_count(&far, &r2));

            let mut brute = BigInt::zero();
            let reach = rat_f64(&r2).sqrt().ceil() as i64 + 2;
            let (fx, fy) = center.approx();
            for xx in (fx.round() as i64 - reach)..=(fx.round() as i64 + reach) {
                for yy in (fy.round() as i64 - reach)..=(fy.round() as i64 + reach) {
                    let dx = Rat::from_integer(xx.into()) - &cx;
                    let dy = Rat::from_integer(yy.into()) - &cy;
                    if &dx * &dx + &dy * &dy <= r2 {
                        brute += 1;
                    }
                }
            }
            assert_eq!(fast, brute);
        }
    }

    #[test]
    fn ball_count_matches_enumeration() {
        let range = DenominatorRange::up_to(40).unwrap();
        let z = grat(1, 3);
        let r = rat(1, 7);
        let n = count_in_ball(PresetName::Modular, &z, &r, &range).unwrap();
        let w = Window::interval(rat(1, 3) - rat(1, 7), rat(1, 3) + rat(1, 7));
        let listed = enumerate_tangents(PresetName::Modular, &w, &range).unwrap();
        assert_eq!(BigInt::from(listed.len()), n);

        let zc = Grat::from_parts(&rat(1, 3), &rat(1, 4));
        let rc = rat(2, 7);
        let nc = count_in_ball(PresetName::Picard, &zc, &rc, &range).unwrap();
        let wb = Window::rect(
            rat(1, 3) - rat(2, 7),
            rat(1, 3) + rat(2, 7),
            rat(1, 4) - rat(2, 7),
            rat(1, 4) + rat(2, 7),
        );
        let r2 = &rc * &rc;
        let in_disk = enumerate_tangents(PresetName::Picard, &wb, &range)
            .unwrap()
            .into_iter()
            .filter(|p| p.dist_sq(&zc) <= r2)
            .count();
        assert_eq!(BigInt::from(in_disk), nc);
    }

    #[test]
    fn enumerate_single_denominator_band() {
        let w = Window::interval(rat(1, 4), rat(3, 4));
        let r = DenominatorRange::new(16, 25).unwrap();
        let got = enumerate_tangents(PresetName::Modular, &w, &r).unwrap();
        assert_eq!(got, rats(&[(2, 5), (3, 5)]));
    }

    #[test]
    fn count_matches_totients_on_band() {
        // Over [0, 1) each q contributes phi(q); the closed interval [0, 1]
        // only differs at q = 1.
        let w = Window::interval(rat(0, 1), rat(1, 1));
        let r = DenominatorRange::new(64, 121).unwrap();
        let count = count_tangents(PresetName::Modular, &w, &r).unwrap();
        assert_eq!(count, BigInt::from(totient(9) + totient(10) + totient(11)));
        assert_eq!(count, BigInt::from(20u32));
        assert_eq!(global_tangent_count(PresetName::Modular, &r), 20.into());
    }

    #[test]
    fn farey_walk_matches_enumeration() {
        for qmax in [1u64, 2, 3, 5, 8, 13, 21] {
            let walk = farey_walk_unit_interval(qmax);
            let w = Window::unit(PresetName::Modular);
            let r = DenominatorRange::up_to(qmax * qmax).unwrap();
            let enumerated = enumerate_tangents(PresetName::Modular, &w, &r).unwrap();
            let as_grat: Vec<Grat> = walk.iter().map(Grat::from_rat).collect();
            assert_eq!(as_grat, enumerated, "order {qmax}");
        }
    }

    #[test]
    fn sieve_agrees_with_enumeration_modular() {
        let w = Window::interval(rat(-1, 3), rat(5, 7));
        let r = DenominatorRange::new(9, 144).unwrap();
        let fast = enumerate_tangents(PresetName::Modular, &w, &r).unwrap();
        let slow = sieve_tangents(PresetName::Modular, &w, &r).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn enumerate_gaussian_small_norm() {
        let w = Window::unit(PresetName::Picard);
        let r = DenominatorRange::new(1, 2).unwrap();
        let got = enumerate_tangents(PresetName::Picard, &w, &r).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0], Grat::new(Gint::new(1, 1), Gint::from_int(2)));
        assert_eq!(got[0].den(), &Gint::new(1, 1));
    }

    #[test]
    fn sieve_agrees_with_enumeration_gaussian() {
        let w = Window::rect(rat(-1, 2), rat(1, 1), rat(0, 1), rat(3, 4));
        let r = DenominatorRange::new(2, 16).unwrap();
        let fast = enumerate_tangents(PresetName::Picard, &w, &r).unwrap();
        let slow = sieve_tangents(PresetName::Picard, &w, &r).unwrap();
        assert_eq!(fast, slow);
        assert!(!fast.is_empty());
    }

    #[test]
    fn window_preset_mismatch_is_an_error() {
        let w = Window::unit(PresetName::Modular);
        let r = DenominatorRange::up_to(4).unwrap();
        assert!(matches!(
            enumerate_tangents(PresetName::Picard, &w, &r),
            Err(Error::InvalidQuery(_))
        ));
    }

    #[test]
    fn interval_count_kernel_examples() {
        // q = 10 on [0, 1]: phi(10) = 4 plus nothing extra at endpoints.
        assert_eq!(count_in_interval(10, &rat(0, 1), &rat(1, 1)), 4.into());
        // q = 1 on [-2, 2]: all five integers.
        assert_eq!(count_in_interval(1, &rat(-2, 1), &rat(2, 1)), 5.into());
        // Negative windows exercise floor division.
        assert_eq!(count_in_interval(6, &rat(-1, 2), &rat(0, 1)), 1.into());
        // Empty.
        assert_eq!(count_in_interval(7, &rat(1, 2), &rat(1, 3)), 0.into());
    }

    #[test]
    fn disk_lattice_count_examples() {
        // |w| <= 1 about the origin: 0, ±1, ±i.
        assert_eq!(
            gaussian_disk_lattice_count(&Grat::zero(), &rat(1, 1)),
            5.into()
        );
        // Radius sqrt(2): adds the four corner units.
        assert_eq!(
            gaussian_disk_lattice_count(&Grat::zero(), &rat(2, 1)),
            9.into()
        );
        // Tiny disk about 1/2: empty.
        assert_eq!(
            gaussian_disk_lattice_count(&grat(1, 2), &rat(1, 100)),
            0.into()
        );
    }

    #[test]
    fn disk_coprime_count_matches_brute_force() {
        let centers = [grat(0, 1), grat(1, 2), Grat::new(Gint::new(1, 1), Gint::from_int(3))];
        let radii = [rat(1, 4), rat(1, 1), rat(9, 4)];
        for q in canonical_gaussian_denominators(&DenominatorRange::up_to(10).unwrap()) {
            for center in &centers {
                for r2 in &radii {
                    let fast = count_in_disk(&q, center, r2);
                    let mut slow = BigInt::zero();
                    for re in -30..=30i64 {
                        for im in -30..=30i64 {
                            let p = Gint::new(re, im);
                            if !p.gcd(&q).is_unit() {
                                continue;
                            }
                            let z = Grat::new(p, q.clone());
                            if &z.dist_sq(center) <= r2 {
                                slow += 1;
                            }
                        }
                    }
                    assert_eq!(fast, slow, "q={q} center={center} r2={r2}");
                }
            }
        }
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(factorize_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(totient(1), 1);
        assert_eq!(totient(9), 6);
        assert_eq!(totient(10), 4);
        assert_eq!(totient(11), 10);

        let f = gaussian_factorize(&Gint::new(5, 0));
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|(p, e)| p.norm() == 5.into() && *e == 1));
        let f2 = gaussian_factorize(&Gint::new(2, 1));
        assert_eq!(f2, vec![(Gint::new(2, 1), 1)]);
        let f3 = gaussian_factorize(&Gint::new(3, 0));
        assert_eq!(f3, vec![(Gint::new(3, 0), 1)]);
        let f4 = gaussian_factorize(&Gint::new(0, 2));
        assert_eq!(f4, vec![(Gint::new(1, 1), 2)]);
    }

    #[test]
    fn gaussian_totient_small_values() {
        assert_eq!(gaussian_totient(&Gint::one()), 1.into());
        assert_eq!(gaussian_totient(&Gint::new(1, 1)), 1.into());
        assert_eq!(gaussian_totient(&Gint::new(2, 0)), 2.into());
        assert_eq!(gaussian_totient(&Gint::new(2, 1)), 4.into());
        assert_eq!(gaussian_totient(&Gint::new(3, 0)), 8.into());
    }

    #[test]
    fn gaussian_totient_counts_residues() {
        // phi(q) = #{residues mod q coprime to q}; check on a fundamental
        // domain q[0,1)^2 by brute force.
        for q in canonical_gaussian_denominators(&DenominatorRange::up_to(25).unwrap()) {
            let mut brute = BigInt::zero();
            let bound = 30i64;
            let nq = q.norm();
            for re in -bound..=bound {
                for im in -bound..=bound {
                    let p = Gint::new(re, im);
                    let w = &p * &q.conj();
                    let zr = Rat::new(w.re, nq.clone());
                    let zi = Rat::new(w.im, nq.clone());
                    let inside = zr >= rat(0, 1)
                        && zr < rat(1, 1)
                        && zi >= rat(0, 1)
                        && zi < rat(1, 1);
                    if inside && p.gcd(&q).is_unit() {
                        brute += 1;
                    }
                }
            }
            assert_eq!(brute, gaussian_totient(&q), "q = {q}");
        }
    }

    #[test]
    fn global_count_gaussian_band() {
        let r = DenominatorRange::new(1, 2).unwrap();
        assert_eq!(global_tangent_count(PresetName::Picard, &r), 1.into());
    }

    #[test]
    fn range_helpers() {
        let r = DenominatorRange::for_min_diameter(&rat(1, 2500)).unwrap();
        assert_eq!(r.norm_max, 2500);
        assert!(r.contains_norm(2500));
        assert!(!r.contains_norm(2501));
        assert!(DenominatorRange::new(0, u64::MAX).is_err());
        let qs: Vec<u64> = modular_denominators(&DenominatorRange::new(64, 121).unwrap()).collect();
        assert_eq!(qs, vec![9, 10, 11]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn count_matches_enumeration_length(
            lo_n in -8i64..8, lo_d in 1i64..6, width_n in 0i64..12, norm_max in 1u64..200
        ) {
            let lo = rat(lo_n, lo_d);
            let hi = &lo + rat(width_n, 7);
            let w = Window::interval(lo, hi);
            let r = DenominatorRange::up_to(norm_max).unwrap();
            let listed = enumerate_tangents(PresetName::Modular, &w, &r).unwrap();
            let counted = count_tangents(PresetName::Modular, &w, &r).unwrap();
            prop_assert_eq!(BigInt::from(listed.len()), counted);
        }

        #[test]
        fn totient_identity(n in 1u64..5000) {
            // sum of phi(d) over divisors d of n equals n.
            let mut divisors = vec![1u64];
            for (p, e) in factorize_u64(n) {
                let len = divisors.len();
                let mut pe = 1;
                for _ in 0..e {
                    pe *= p;
                    for i in 0..len {
                        divisors.push(divisors[i] * pe);
                    }
                }
            }
            let total: u64 = divisors.iter().map(|&d| totient(d)).sum();
            prop_assert_eq!(total, n);
        }

        #[test]
        fn gaussian_totient_multiplicative(a in 1i64..40, b in 0i64..40, c in 1i64..40, d in 0i64..40) {
            let x = Gint::new(a, b);
            let y = Gint::new(c, d);
            if x.gcd(&y).is_unit() {
                let prod = gaussian_totient(&(&x * &y));
                prop_assert_eq!(prod, gaussian_totient(&x) * gaussian_totient(&y));
            }
        }
    }
}
