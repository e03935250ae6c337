//! Exact arithmetic: arbitrary-precision Gaussian integers and Gaussian
//! rationals in canonical form.
//!
//! Rational integers embed as Gaussian integers with zero imaginary part, so a
//! single representation serves both the modular preset (real entries) and the
//! Picard preset. Canonical forms:
//!
//! - a nonzero Gaussian integer is *canonical* when its argument lies in
//!   `[0, pi/2)`, i.e. `re > 0 && im >= 0`; every nonzero element has exactly
//!   one canonical associate among its four unit multiples;
//! - a Gaussian rational is stored as `num/den` with `gcd(num, den)` a unit and
//!   `den` canonical. For real values this reduces to lowest terms with a
//!   positive denominator.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, used for window endpoints, diameters, and all
/// one-dimensional exact values.
pub type Rat = BigRational;

/// Converts a rational to `f64`, saturating instead of failing on extreme
/// magnitudes (which do not occur in practice).
pub fn rat_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational from an `f64` (every finite float is a dyadic rational).
///
/// Panics on NaN or infinite input.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// `x^expo` when the result is exactly rational, `None` otherwise.
///
/// Requires `x > 0`. For `expo = u/v` in lowest terms the result exists
/// precisely when numerator and denominator of `x` are both `v`-th powers.
pub fn rat_pow(x: &Rat, expo: &Rat) -> Option<Rat> {
    if !x.is_positive() {
        return None;
    }
    let v = expo.denom().to_u32()?;
    let rn = x.numer().nth_root(v);
    let rd = x.denom().nth_root(v);
    if rn.pow(v) != *x.numer() || rd.pow(v) != *x.denom() {
        return None;
    }
    let u = expo.numer().to_i32()?;
    Some(Rat::new(rn, rd).pow(u))
}

/// Gaussian integer with arbitrary-precision components.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gint {
    pub re: BigInt,
    pub im: BigInt,
}

impl Gint {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Gint { re: re.into(), im: im.into() }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Gint { re: n.into(), im: BigInt::zero() }
    }

    pub fn zero() -> Self {
        Gint::from_int(0)
    }

    pub fn one() -> Self {
        Gint::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Gint::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True when the element is one of the four units `1, i, -1, -i`.
    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Gint {
        Gint { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Field norm `re^2 + im^2`; zero only for the zero element.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplication by `i`: `(re, im) -> (-im, re)`.
    pub fn mul_i(&self) -> Gint {
        Gint { re: -self.im.clone(), im: self.re.clone() }
    }

    /// Quotient if `rhs` divides `self` exactly, else `None`.
    pub fn div_exact_checked(&self, rhs: &Gint) -> Option<Gint> {
        let (q, r) = self.div_round(rhs);
        r.is_zero().then_some(q)
    }

    /// True when the argument lies in `[0, pi/2)`: `re > 0 && im >= 0`.
    pub fn is_canonical(&self) -> bool {
        self.re.is_positive() && !self.im.is_negative()
    }

    /// The canonical associate together with the unit `u` such that
    /// `u * self` is canonical. Zero maps to itself with unit one.
    pub fn canonical_associate(&self) -> (Gint, Gint) {
        if self.is_zero() {
            return (self.clone(), Gint::one());
        }
        let mut v = self.clone();
        let mut u = Gint::one();
        for _ in 0..3 {
            if v.is_canonical() {
                return (v, u);
            }
            v = v.mul_i();
            u = u.mul_i();
        }
        debug_assert!(v.is_canonical());
        (v, u)
    }

    /// Exact division; panics if `rhs` does not divide `self`.
    pub fn div_exact(&self, rhs: &Gint) -> Gint {
        assert!(!rhs.is_zero(), "division by zero Gaussian integer");
        let n = rhs.norm();
        let prod = self * &rhs.conj();
        let (qr, rr) = prod.re.div_rem(&n);
        let (qi, ri) = prod.im.div_rem(&n);
        assert!(rr.is_zero() && ri.is_zero(), "inexact Gaussian division");
        Gint { re: qr, im: qi }
    }

    /// Euclidean division with `norm(rem) <= norm(rhs) / 2`: the quotient is
    /// the componentwise nearest integer to `self / rhs`.
    pub fn div_round(&self, rhs: &Gint) -> (Gint, Gint) {
        assert!(!rhs.is_zero(), "division by zero Gaussian integer");
        let n = rhs.norm();
        let prod = self * &rhs.conj();
        let q = Gint { re: round_div(&prod.re, &n), im: round_div(&prod.im, &n) };
        let rem = self - &(&q * rhs);
        (q, rem)
    }

    /// Greatest common divisor up to units, returned in canonical form.
    pub fn gcd(&self, other: &Gint) -> Gint {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_round(&b);
            a = b;
            b = r;
        }
        a.canonical_associate().0
    }

    pub fn approx(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Nearest-integer division, ties rounded toward positive infinity.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(b.is_positive());
    let two_a: BigInt = a * 2 + b;
    two_a.div_floor(&(b * 2))
}

impl fmt::Debug for Gint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Gint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

macro_rules! gint_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a, 'b> $trait<&'b Gint> for &'a Gint {
            type Output = Gint;
            fn $method(self, rhs: &'b Gint) -> Gint {
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait<Gint> for Gint {
            type Output = Gint;
            fn $method(self, rhs: Gint) -> Gint {
                $trait::$method(&self, &rhs)
            }
        }
    };
}

gint_binop!(Add, add, |a, b| Gint { re: &a.re + &b.re, im: &a.im + &b.im });
gint_binop!(Sub, sub, |a, b| Gint { re: &a.re - &b.re, im: &a.im - &b.im });
gint_binop!(Mul, mul, |a, b| Gint {
    re: &a.re * &b.re - &a.im * &b.im,
    im: &a.re * &b.im + &a.im * &b.re,
});

impl Neg for &Gint {
    type Output = Gint;
    fn neg(self) -> Gint {
        Gint { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Gint {
    type Output = Gint;
    fn neg(self) -> Gint {
        -&self
    }
}

/// Gaussian rational `num / den` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grat {
    num: Gint,
    den: Gint,
}

impl Grat {
    /// Builds `num / den`, reducing to canonical form. Panics when `den` is
    /// zero; boundary points at infinity are represented separately.
    pub fn new(num: Gint, den: Gint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        let (num, den) = if g.is_unit() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        let (den, u) = den.canonical_associate();
        let num = &num * &u;
        Grat { num, den }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Grat { num: Gint::from_int(n), den: Gint::one() }
    }

    pub fn from_gint(n: Gint) -> Self {
        Grat { num: n, den: Gint::one() }
    }

    pub fn from_rat(x: &Rat) -> Self {
        Grat::new(Gint::from_int(x.numer().clone()), Gint::from_int(x.denom().clone()))
    }

    /// Exact value `(re + im*i)` from two rationals.
    pub fn from_parts(re: &Rat, im: &Rat) -> Self {
        let den = x_lcm(re.denom(), im.denom());
        let nre = re.numer() * (&den / re.denom());
        let nim = im.numer() * (&den / im.denom());
        Grat::new(Gint::new(nre, nim), Gint::from_int(den))
    }

    pub fn zero() -> Self {
        Grat::from_int(0)
    }

    pub fn num(&self) -> &Gint {
        &self.num
    }

    pub fn den(&self) -> &Gint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Denominator norm `N(den)`; for real values this is `den^2`.
    pub fn den_norm(&self) -> BigInt {
        self.den.norm()
    }

    pub fn is_real(&self) -> bool {
        // Imaginary part of num * conj(den) must vanish.
        (&self.num * &self.den.conj()).im.is_zero()
    }

    pub fn as_real(&self) -> Option<Rat> {
        if self.is_real() {
            Some(self.re())
        } else {
            None
        }
    }

    /// Exact real part.
    pub fn re(&self) -> Rat {
        Rat::new((&self.num * &self.den.conj()).re, self.den.norm())
    }

    /// Exact imaginary part.
    pub fn im(&self) -> Rat {
        Rat::new((&self.num * &self.den.conj()).im, self.den.norm())
    }

    /// Squared Euclidean distance to another value, exactly.
    pub fn dist_sq(&self, other: &Grat) -> Rat {
        let d = self - other;
        Rat::new(d.num.norm(), d.den.norm())
    }

    /// Squared modulus, exactly.
    pub fn norm_sq(&self) -> Rat {
        Rat::new(self.num.norm(), self.den.norm())
    }

    pub fn conj(&self) -> Grat {
        Grat::new(self.num.conj(), self.den.conj())
    }

    /// Scales by a real rational factor.
    pub fn mul_rat(&self, r: &Rat) -> Grat {
        Grat::new(
            &self.num * &Gint::from_int(r.numer().clone()),
            &self.den * &Gint::from_int(r.denom().clone()),
        )
    }

    pub fn approx(&self) -> (f64, f64) {
        (rat_f64(&self.re()), rat_f64(&self.im()))
    }

    /// Value ordering by real part, then imaginary part. Used for
    /// deterministic output sorting.
    pub fn cmp_value(&self, other: &Grat) -> Ordering {
        self.re().cmp(&other.re()).then_with(|| self.im().cmp(&other.im()))
    }
}

fn x_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a / a.gcd(b) * b
}

macro_rules! grat_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a, 'b> $trait<&'b Grat> for &'a Grat {
            type Output = Grat;
            fn $method(self, rhs: &'b Grat) -> Grat {
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait<Grat> for Grat {
            type Output = Grat;
            fn $method(self, rhs: Grat) -> Grat {
                $trait::$method(&self, &rhs)
            }
        }
    };
}

grat_binop!(Add, add, |a, b| Grat::new(
    &(&a.num * &b.den) + &(&b.num * &a.den),
    &a.den * &b.den
));
grat_binop!(Sub, sub, |a, b| Grat::new(
    &(&a.num * &b.den) - &(&b.num * &a.den),
    &a.den * &b.den
));
grat_binop!(Mul, mul, |a, b| Grat::new(&a.num * &b.num, &a.den * &b.den));

impl Neg for &Grat {
    type Output = Grat;
    fn neg(self) -> Grat {
        Grat { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Debug for Grat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Grat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.is_real() && self.den.is_real() {
            write!(f, "{}/{}", self.num.re, self.den.re)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
