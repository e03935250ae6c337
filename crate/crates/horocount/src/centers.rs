//! Fixed test centers: badly approximable and generic boundary points as
//! deep convergents.
//!
//! Experiments need irrational centers, but exact counting needs rational
//! inputs. Each center is the deepest continued-fraction convergent with
//! denominator within the supported range, giving a rational within
//! `2^-80` of the true value: far below every scale any experiment probes
//! (the coarsest use is `2^-64` times a radius no smaller than `2^-16`).
//!
//! The golden ratio fractional part and `sqrt(2) - 1` are the extreme
//! badly approximable points (continued fractions all ones, all twos);
//! `1/e` has unbounded partial quotients and stands in for generic points.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{Gint, Grat, Rat};

fn real_grat(x: &Rat) -> Grat {
    Grat::new(
        Gint::from_int(x.numer().clone()),
        Gint::from_int(x.denom().clone()),
    )
}

fn golden_convergent(cap: &BigInt) -> Grat {
    let mut a = BigInt::from(1);
    let mut b = BigInt::from(1);
    loop {
        let next = &a + &b;
        if next > *cap {
            break;
        }
        a = std::mem::replace(&mut b, next);
    }
    Grat::new(Gint::from_int(a), Gint::from_int(b))
}

fn pell_convergent(cap: &BigInt) -> Grat {
    let mut h = BigInt::from(1);
    let mut k = BigInt::from(1);
    loop {
        let nh = &h + 2 * &k;
        let nk = &h + &k;
        if nk > *cap {
            break;
        }
        h = nh;
        k = nk;
    }
    Grat::new(Gint::from_int(h - &k), Gint::from_int(k))
}

/// `(sqrt(5) - 1)/2 = 0.6180...` as the Fibonacci convergent
/// `F_n / F_{n+1}` with the largest `F_{n+1} <= 2^42`.
pub fn golden() -> &'static Grat {
    static Z: OnceLock<Grat> = OnceLock::new();
    Z.get_or_init(|| golden_convergent(&BigInt::from(1u64 << 42)))
}

/// `sqrt(2) - 1 = 0.4142...` from the Pell convergents `h/k` of
/// `sqrt(2)`: the value is `(h - k)/k` for the deepest `k <= 2^42`.
pub fn sqrt2_minus_one() -> &'static Grat {
    static Z: OnceLock<Grat> = OnceLock::new();
    Z.get_or_init(|| pell_convergent(&BigInt::from(1u64 << 42)))
}

/// `1/e = 0.3678...` as the alternating partial sum
/// `sum_{j=0}^{24} (-1)^j / j!`, within `1/25! < 2^-83` of the true value.
pub fn inv_e() -> &'static Grat {
    static Z: OnceLock<Grat> = OnceLock::new();
    Z.get_or_init(|| {
        let mut sum = Rat::zero();
        let mut term = Rat::one();
        for j in 0..=24u32 {
            if j > 0 {
                term = -term / Rat::from_integer(BigInt::from(j));
            }
            sum += &term;
        }
        real_grat(&sum)
    })
}

/// The standard badly approximable and generic center triple.
pub fn modular_centers() -> Vec<Grat> {
    vec![
        sqrt2_minus_one().clone(),
        golden().clone(),
        inv_e().clone(),
    ]
}

/// Complex test centers with badly approximable coordinates.
pub fn picard_centers() -> Vec<Grat> {
    let s = sqrt2_minus_one().re();
    let g = golden().re();
    let e = inv_e().re();
    vec![
        Grat::from_parts(&s, &g),
        Grat::from_parts(&g, &e),
        Grat::from_parts(&e, &s),
    ]
}

/// Shallow-convergent variants of the complex test centers. Component
/// denominators stay below `2^19`, which keeps every scaled lattice count
/// taken at these centers inside the machine-word kernel; the deep centers
/// are still preferred anywhere only a few counts are needed.
pub fn picard_calibration_centers() -> Vec<Grat> {
    let cap = BigInt::from(1u64 << 19);
    let s = pell_convergent(&cap).re();
    let g = golden_convergent(&cap).re();
    let mut sum = Rat::zero();
    let mut term = Rat::one();
    for j in 0..=9u32 {
        if j > 0 {
            term = -term / Rat::from_integer(BigInt::from(j));
        }
        sum += &term;
    }
    let e = sum;
    vec![
        Grat::from_parts(&s, &g),
        Grat::from_parts(&g, &e),
        Grat::from_parts(&e, &s),
    ]
}

/// The `n`-th point of the orbit of `z0` under `z -> z/(z + 1)`, which
/// approaches the cusp at zero at rate `1/n`: for `z0 = a/b` this is
/// exactly `a/(n a + b)`, already in lowest terms.
pub fn cusp_approach(z0: &Grat, n: u64) -> Grat {
    let a = z0.num().clone();
    let b = z0.den().clone();
    let n = Gint::from_int(BigInt::from(n));
    Grat::new(a.clone(), n * a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn golden_is_a_deep_fibonacci_convergent() {
        let z = golden();
        let a = z.num().re.clone();
        let b = z.den().re.clone();
        // Consecutive Fibonacci numbers: b^2 - ab - a^2 = ±1.
        let det = &b * &b - &a * &b - &a * &a;
        assert!(det.magnitude().is_one());
        assert!(b > BigInt::from(1u64 << 41) && b <= BigInt::from(1u64 << 42));
        let v = z.approx().0;
        assert!((v - 0.6180339887498949).abs() < 1e-15);
    }

    #[test]
    fn sqrt2_center_is_a_pell_convergent() {
        let z = sqrt2_minus_one();
        let hk = z.num().re.clone() + z.den().re.clone();
        let k = z.den().re.clone();
        // Pell pairs satisfy h^2 - 2 k^2 = ±1.
        let det: BigInt = &hk * &hk - BigInt::from(2) * &k * &k;
        assert!(det.magnitude().is_one());
        let v = z.approx().0;
        assert!((v - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn inv_e_matches_float() {
        let v = inv_e().approx().0;
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        // Denominator is 24! or a divisor after reduction.
        let den = inv_e().den().re.clone();
        let fact24: BigInt = (1..=24u32).map(BigInt::from).product();
        assert!((&fact24 % &den).to_u32() == Some(0));
    }

    #[test]
    fn cusp_approach_is_exact() {
        let z0 = golden();
        let z3 = cusp_approach(z0, 3);
        // z/(z+1) applied three times.
        let mut w = z0.re();
        for _ in 0..3 {
            w = &w / (&w + Rat::one());
        }
        assert_eq!(z3.re(), w);
        assert!(z3.den_norm() > z0.den_norm());
    }
}
