//! Internal helpers: deterministic parallel map, stable float summation,
//! least-squares slope fitting, and logarithms of big rationals.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::arith::Rat;
use crate::error::{Error, Result};

/// Floor of a nonnegative rational as `u64`; errors when it overflows the
/// supported denominator range.
pub(crate) fn rat_floor_u64(x: &Rat) -> Result<u64> {
    x.floor().to_integer().to_u64().ok_or_else(|| {
        Error::InvalidQuery("scale exceeds the supported denominator range".into())
    })
}

/// Natural log of a positive big integer, scaled through the top 53 bits so
/// magnitudes beyond `f64` range stay finite.
pub(crate) fn ln_big(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("fits f64").ln();
    }
    let shift = bits - 53;
    let top: BigInt = n >> shift;
    top.to_f64().expect("fits f64").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub(crate) fn ln_rat(x: &Rat) -> f64 {
    debug_assert!(x.is_positive());
    ln_big(x.numer()) - ln_big(x.denom())
}

/// Number of worker threads for data-parallel loops. Reads
/// `HOROCOUNT_THREADS` once; defaults to the available parallelism.
pub(crate) fn thread_count() -> usize {
    static N: OnceLock<usize> = OnceLock::new();
    *N.get_or_init(|| {
        std::env::var("HOROCOUNT_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            })
    })
}

/// Maps `f` over `items` on up to `thread_count()` scoped threads and returns
/// the results in input order. The output is identical to a sequential map;
/// threading only changes wall-clock time.
pub(crate) fn parallel_map_deterministic<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = thread_count().min(items.len().max(1));
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    std::thread::scope(|scope| {
        let f = &f;
        let mut handles = Vec::new();
        for (slot_chunk, item_chunk) in out.chunks_mut(chunk).zip(items.chunks(chunk)) {
            handles.push(scope.spawn(move || {
                for (slot, item) in slot_chunk.iter_mut().zip(item_chunk) {
                    *slot = Some(f(item));
                }
            }));
        }
        for h in handles {
            h.join().expect("worker thread panicked");
        }
    });
    out.into_iter().map(|x| x.expect("all slots filled")).collect()
}

/// Pairwise summation: same result regardless of thread count, smaller
/// rounding error than a running sum. Inputs must arrive in a canonical
/// order (callers sort by denominator or index first).
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Least-squares slope of `ys` against `xs`. At least two distinct abscissae
/// required; the caller validates.
pub(crate) fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    debug_assert!(sxx > 0.0, "degenerate abscissae");
    sxy / sxx
}

/// Minimum slope over all point pairs. For data lying on a line this equals
/// the least-squares slope; otherwise it is a lower envelope (the
/// least-squares slope is a convex combination of pair slopes).
pub(crate) fn min_pair_slope(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert!(xs.len() >= 2);
    let mut best = f64::INFINITY;
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            if xs[i] != xs[j] {
                best = best.min((ys[j] - ys[i]) / (xs[j] - xs[i]));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        let got = parallel_map_deterministic(items.clone(), |&x| x * x);
        let want: Vec<u64> = items.iter().map(|&x| x * x).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn pairwise_sum_exactness_on_integers() {
        let xs: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 5050.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5]), 3.5);
    }

    #[test]
    fn slope_of_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        assert!((lsq_slope(&xs, &ys) - 2.5).abs() < 1e-12);
        assert!((min_pair_slope(&xs, &ys) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn min_pair_slope_below_lsq() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 0.5, 2.0];
        assert!(min_pair_slope(&xs, &ys) <= lsq_slope(&xs, &ys));
        assert!((min_pair_slope(&xs, &ys) - 0.5).abs() < 1e-12);
    }
}
