//! Counting experiments: exact horoball counts in shrinking balls compared
//! against the predictions of the counting theorems, with comparability
//! bands, calibration, and the proximity dichotomy.
//!
//! A query fixes a ball `B(z, R)`, a scale base `tau in (0, 1)`, and a band
//! index `k`; the band holds the horoballs with diameter in
//! `[tau^(k+1), tau^k)`, equivalently denominator norm in
//! `(tau^-k, tau^-(k-1)]`. Every count here is exact (divisor-sum kernels
//! over a rational window); only predictions and ratios are floating point.
//!
//! Regimes, by how the band scale compares to the ball:
//!
//! - `local`:        `tau^k < R^2`, prediction `tau^(-k delta) mu_delta(B)`;
//! - `theoretical`:  boundary cases `tau^k = R^2` or `tau^k >= R`;
//! - `intermediate`: `R^2 < tau^k < R`, prediction `(R / tau^k)^delta`
//!   under a two-sided distance hypothesis to a fixed cusp;
//! - `proximity`:    `tau^(k+1) > 2R`, where disjointness forces the count
//!   to be zero or one;
//! - `global`:       counts over the fundamental window `[0, 1)^d` instead
//!   of a ball, prediction `tau^(-k delta)`.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{rat_f64, rat_pow, Grat, Rat};
use crate::centers;
use crate::error::{Error, Result};
use crate::farey::{self, DenominatorRange, Window};
use crate::measures::{
    atom_weight, largest_tangent_in_ball, mu_delta_ball, mu_s_ball, require_center,
    validate_exponent,
};
use crate::moebius::{GroupPreset, PresetName};
use crate::util::{lsq_slope, rat_floor_u64};

/// Largest denominator norm a single banded count will scan, per preset.
/// Keeps every experiment's exhaustive kernel within interactive time.
const MODULAR_NORM_CAP: u64 = 1 << 26;
const PICARD_NORM_CAP: u64 = 1 << 16;

/// Denominator norm cap for exhaustive proximity certification.
const MODULAR_PROXIMITY_CAP: u64 = 1 << 24;
const PICARD_PROXIMITY_CAP: u64 = 1 << 12;

/// Band spread target used by calibration.
const CALIBRATION_TARGET: f64 = 50.0;

fn norm_cap(preset: PresetName) -> u64 {
    match preset {
        PresetName::Modular => MODULAR_NORM_CAP,
        PresetName::Picard => PICARD_NORM_CAP,
    }
}

/// Largest radius accepted by the small-scale experiments.
pub fn small_scale_threshold(preset: PresetName) -> Rat {
    match preset {
        PresetName::Modular => Rat::new(BigInt::one(), BigInt::from(16)),
        PresetName::Picard => Rat::new(BigInt::one(), BigInt::from(8)),
    }
}

/// Which counting theorem a record is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Local,
    Theoretical,
    Intermediate,
    Proximity,
    Global,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Regime::Local => "local",
            Regime::Theoretical => "theoretical",
            Regime::Intermediate => "intermediate",
            Regime::Proximity => "proximity",
            Regime::Global => "global",
        };
        write!(f, "{name}")
    }
}

/// A banded counting query over the ball `B(z, r)`.
#[derive(Debug, Clone)]
pub struct CountQuery {
    pub preset: PresetName,
    pub z: Grat,
    pub r: Rat,
    pub tau: Rat,
    pub k: u32,
}

impl CountQuery {
    pub fn new(preset: PresetName, z: Grat, r: Rat, tau: Rat, k: u32) -> Result<Self> {
        let group = GroupPreset::new(preset);
        require_center(&group, &z)?;
        if !r.is_positive() || r > Rat::new(BigInt::one(), BigInt::from(2)) {
            return Err(Error::InvalidQuery(
                "ball radius must lie in (0, 1/2]".into(),
            ));
        }
        if !tau.is_positive() || tau >= Rat::one() {
            return Err(Error::InvalidQuery(
                "scale base tau must lie in (0, 1)".into(),
            ));
        }
        if k == 0 {
            return Err(Error::InvalidQuery("band index k must be positive".into()));
        }
        Ok(CountQuery { preset, z, r, tau, k })
    }

    /// The band's upper diameter `tau^k`.
    pub fn tau_k(&self) -> Rat {
        self.tau.pow(self.k as i32)
    }

    /// Denominator norms of the band: `(tau^-k, tau^-(k+1)]`.
    pub fn band_range(&self) -> Result<DenominatorRange> {
        let inv = self.tau_k().recip();
        let norm_min = rat_floor_u64(&inv)?;
        let norm_max = rat_floor_u64(&(&inv * self.tau.recip()))?;
        DenominatorRange::new(norm_min, norm_max)
    }
}

/// One counted band with its theorem prediction.
#[derive(Debug, Clone)]
pub struct CountRecord {
    pub query: CountQuery,
    pub count: BigInt,
    pub prediction: f64,
    pub regime: Regime,
}

impl CountRecord {
    pub fn ratio(&self) -> f64 {
        self.count.to_f64().unwrap_or(f64::INFINITY) / self.prediction
    }
}

/// Extremes of `count / prediction` over a record set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparabilityBand {
    pub c_lo: f64,
    pub c_hi: f64,
    pub n_records: usize,
}

impl ComparabilityBand {
    /// Multiplicative width `c_hi / c_lo`; infinite when some count is zero.
    pub fn spread(&self) -> f64 {
        if self.c_lo > 0.0 {
            self.c_hi / self.c_lo
        } else {
            f64::INFINITY
        }
    }
}

/// Min/max of `count / prediction`. Errors on an empty set or on any
/// non-positive prediction.
pub fn band_fit(records: &[CountRecord]) -> Result<ComparabilityBand> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut c_lo = f64::INFINITY;
    let mut c_hi = f64::NEG_INFINITY;
    for rec in records {
        if rec.prediction.partial_cmp(&0.0) != Some(Ordering::Greater) {
            return Err(Error::NonPositivePrediction(rec.prediction));
        }
        let ratio = rec.ratio();
        c_lo = c_lo.min(ratio);
        c_hi = c_hi.max(ratio);
    }
    Ok(ComparabilityBand { c_lo, c_hi, n_records: records.len() })
}

fn classify(query: &CountQuery) -> Regime {
    let tk = query.tau_k();
    let tk_next = &tk * &query.tau;
    let two_r = &query.r + &query.r;
    if tk_next > two_r {
        return Regime::Proximity;
    }
    let r2 = &query.r * &query.r;
    if tk < r2 {
        return Regime::Local;
    }
    if tk > r2 && tk < query.r {
        return Regime::Intermediate;
    }
    Regime::Theoretical
}

/// Exact count of the query's band inside `B(z, r)`, with the local-theorem
/// prediction `tau^(-k delta) mu_delta(B)` and the regime the scales fall in.
///
/// When the band lies entirely above the ball's diameter
/// (`tau^(k+1) > 2R`), horoball disjointness forces the count to be zero or
/// one; that is checked here unconditionally.
pub fn count_in_ball(query: &CountQuery) -> Result<CountRecord> {
    let group = GroupPreset::new(query.preset);
    let range = query.band_range()?;
    let count = farey::count_in_ball(query.preset, &query.z, &query.r, &range)?;
    let prediction = rat_f64(&query.tau_k().recip())
        .powi(group.boundary_dim() as i32)
        * mu_delta_ball(&group, &query.z, &query.r)?;
    let regime = classify(query);
    if regime == Regime::Proximity {
        assert!(
            count <= BigInt::one(),
            "disjointness violated: {count} band horoballs in a ball of diameter \
             below the band scale"
        );
    }
    Ok(CountRecord { query: query.clone(), count, prediction, regime })
}

/// Per-band counts over the fundamental window with the fitted decay rate.
#[derive(Debug, Clone)]
pub struct GlobalCountFit {
    pub records: Vec<CountRecord>,
    /// Least-squares slope of `ln count` against `k ln(1/tau)`; the counting
    /// theorem predicts this converges to `delta`.
    pub slope: f64,
    pub band: ComparabilityBand,
}

/// Counts each band `k` in `k_range` over the fundamental window `[0, 1)^d`
/// via totient sums and fits the decay rate.
///
/// The attached queries describe the covering ball of the window; the counts
/// themselves are the exact fundamental-window totals.
pub fn global_count(
    preset: PresetName,
    tau: &Rat,
    k_range: RangeInclusive<u32>,
) -> Result<GlobalCountFit> {
    let group = GroupPreset::new(preset);
    let n_points = k_range.clone().count();
    if n_points < 4 {
        return Err(Error::RegressionPoints { need: 4, got: n_points });
    }
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let center = if group.gaussian() {
        Grat::from_parts(&half, &half)
    } else {
        Grat::from_rat(&half)
    };
    let mut records = Vec::with_capacity(n_points);
    for k in k_range {
        let query = CountQuery::new(preset, center.clone(), half.clone(), tau.clone(), k)?;
        let count = farey::global_tangent_count(preset, &query.band_range()?);
        let prediction = rat_f64(&query.tau_k().recip()).powi(group.boundary_dim() as i32);
        records.push(CountRecord { query, count, prediction, regime: Regime::Global });
    }
    let log_inv_tau = -rat_f64(tau).ln();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for rec in &records {
        if rec.count.is_positive() {
            xs.push(rec.query.k as f64 * log_inv_tau);
            ys.push(rec.count.to_f64().expect("window count fits f64").ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::RegressionPoints { need: 4, got: xs.len() });
    }
    let slope = lsq_slope(&xs, &ys);
    let band = band_fit(&records)?;
    Ok(GlobalCountFit { records, slope, band })
}

/// Local-regime sweep: every band `k` with `tau^k < C R^2` (up to a fixed
/// depth) for each center and radius on the grid.
#[derive(Debug, Clone)]
pub struct LocalExperiment {
    pub records: Vec<CountRecord>,
    pub band: ComparabilityBand,
    /// Largest `count / prediction` seen over the wider range
    /// `tau^k < R`, certifying the one-sided theoretical-regime bound.
    pub c_upper: f64,
    /// Grid points whose radius sat above the small-scale threshold and
    /// were excluded.
    pub skipped: usize,
}

/// Runs the local counting experiment on a grid of centers and radii.
///
/// Radii above the preset's small-scale threshold are flagged and skipped
/// rather than mixed into the fit. Depth limits how many bands past the
/// first local one are counted; bands whose norms exceed the preset cap are
/// dropped.
pub fn local_count_experiment(
    preset: PresetName,
    z_list: &[Grat],
    r_list: &[Rat],
    tau: &Rat,
    c_window: &Rat,
    depth: u32,
) -> Result<LocalExperiment> {
    if z_list.is_empty() || r_list.is_empty() {
        return Err(Error::TooFewSamples(
            "local experiment needs at least one center and one radius".into(),
        ));
    }
    if !c_window.is_positive() {
        return Err(Error::InvalidQuery("window constant C must be positive".into()));
    }
    let threshold = small_scale_threshold(preset);
    let cap = norm_cap(preset);
    let mut records = Vec::new();
    let mut upper_records = Vec::new();
    let mut skipped = 0usize;
    for z in z_list {
        for r in r_list {
            if r > &threshold {
                skipped += 1;
                continue;
            }
            // First band at or below the ball scale, for the upper-bound
            // certificate; first strictly local band for the fit.
            let local_floor = c_window * r * r;
            let mut tau_k = tau.clone();
            let mut k = 1u32;
            while &tau_k >= r {
                tau_k *= tau;
                k += 1;
            }
            let mut k_local = None;
            loop {
                if rat_floor_u64(&(tau_k.recip() * tau.recip())).map_or(true, |n| n > cap) {
                    break;
                }
                let query = CountQuery::new(preset, z.clone(), r.clone(), tau.clone(), k)?;
                let record = count_in_ball(&query)?;
                let local = tau_k < local_floor;
                if local && k_local.is_none() {
                    k_local = Some(k);
                }
                if local {
                    records.push(record.clone());
                }
                upper_records.push(record);
                match k_local {
                    Some(k0) if k >= k0 + depth => break,
                    _ => {}
                }
                tau_k *= tau;
                k += 1;
            }
        }
    }
    let band = band_fit(&records)?;
    let c_upper = upper_records
        .iter()
        .map(CountRecord::ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LocalExperiment { records, band, c_upper, skipped })
}

/// A counting query in the intermediate regime `R^2 < tau^k < R`, tied to a
/// reference cusp `p0` through the two-sided hypothesis
/// `c1 tau^(k/2) <= |z - p0| <= c2 sqrt(R |H_p0|)`.
#[derive(Debug, Clone)]
pub struct IntermediateQuery {
    pub query: CountQuery,
    pub p0: Grat,
    pub c1: Rat,
    pub c2: Rat,
}

impl IntermediateQuery {
    /// Validates the regime and both hypothesis inequalities exactly
    /// (in squared form, so `tau^(k/2)` never needs a root).
    pub fn new(
        preset: PresetName,
        z: Grat,
        r: Rat,
        tau: Rat,
        k: u32,
        p0: Grat,
        c1: Rat,
        c2: Rat,
    ) -> Result<Self> {
        let query = CountQuery::new(preset, z, r, tau, k)?;
        let group = GroupPreset::new(preset);
        require_center(&group, &p0)?;
        if c1 <= Rat::one() {
            return Err(Error::InvalidQuery(
                "intermediate constant c1 must exceed 1".into(),
            ));
        }
        if !c2.is_positive() || c2 >= Rat::one() {
            return Err(Error::InvalidQuery(
                "intermediate constant c2 must lie in (0, 1)".into(),
            ));
        }
        let tk = query.tau_k();
        let r2 = &query.r * &query.r;
        if !(tk > r2 && tk < query.r) {
            return Err(Error::InvalidQuery(
                "intermediate regime requires R^2 < tau^k < R".into(),
            ));
        }
        let t2 = query.z.dist_sq(&p0);
        if &c1 * &c1 * &tk > t2 {
            return Err(Error::InvalidQuery(
                "hypothesis fails: center closer to the cusp than c1 tau^(k/2)".into(),
            ));
        }
        let h = Rat::new(BigInt::one(), p0.den_norm());
        if t2 > &c2 * &c2 * &query.r * &h {
            return Err(Error::InvalidQuery(
                "hypothesis fails: center farther from the cusp than c2 sqrt(R |H|)".into(),
            ));
        }
        Ok(IntermediateQuery { query, p0, c1, c2 })
    }
}

/// Exact band count against the intermediate prediction `(R / tau^k)^delta`.
pub fn intermediate_experiment(iq: &IntermediateQuery) -> Result<CountRecord> {
    let group = GroupPreset::new(iq.query.preset);
    let range = iq.query.band_range()?;
    let count = farey::count_in_ball(iq.query.preset, &iq.query.z, &iq.query.r, &range)?;
    let prediction =
        rat_f64(&(&iq.query.r / iq.query.tau_k())).powi(group.boundary_dim() as i32);
    Ok(CountRecord {
        query: iq.query.clone(),
        count,
        prediction,
        regime: Regime::Intermediate,
    })
}

/// Builds intermediate queries along the cusp-approach orbit
/// `z_n = z0 / (n z0 + 1)` toward the cusp at the origin.
///
/// For each `n` the radius is `2 |z_n|^2 / c2^2` (placing `z_n` inside the
/// upper hypothesis window with slack) and `k` is the smallest band index
/// satisfying the lower hypothesis; parameter combinations that violate the
/// regime at small `n` are skipped.
pub fn intermediate_family(
    preset: PresetName,
    z0: &Grat,
    tau: &Rat,
    c1: &Rat,
    c2: &Rat,
    n_range: RangeInclusive<u64>,
) -> Result<Vec<IntermediateQuery>> {
    let p0 = Grat::from_int(0);
    let threshold = small_scale_threshold(preset);
    let two = Rat::from_integer(BigInt::from(2));
    let mut out = Vec::new();
    for n in n_range {
        let z = centers::cusp_approach(z0, n);
        let t2 = z.dist_sq(&p0);
        let r = &two * &t2 / (c2 * c2);
        if r > threshold {
            continue;
        }
        let target = &t2 / (c1 * c1);
        let mut tk = tau.clone();
        let mut k = 1u32;
        while tk > target {
            tk *= tau;
            k += 1;
        }
        for k_try in [k, k + 1] {
            if let Ok(iq) = IntermediateQuery::new(
                preset,
                z.clone(),
                r.clone(),
                tau.clone(),
                k_try,
                p0.clone(),
                c1.clone(),
                c2.clone(),
            ) {
                out.push(iq);
                break;
            }
        }
    }
    Ok(out)
}

/// A proximity query: does the ball `B(z, R)` meet more than one horoball of
/// diameter at least `c R^lambda`?
#[derive(Debug, Clone)]
pub struct ProximityQuery {
    pub preset: PresetName,
    pub z: Grat,
    pub r: Rat,
    pub lambda: Rat,
    pub c: Rat,
    pub p0: Grat,
    r_lambda: Rat,
}

impl ProximityQuery {
    /// Requires `lambda in (1, 2]`, `c >= 1`, and for `lambda = 2` the
    /// strict constant condition `c |H_p0| > 1`. `R^lambda` must be exactly
    /// rational so the hypothesis can be tested without rounding.
    pub fn new(
        preset: PresetName,
        z: Grat,
        r: Rat,
        lambda: Rat,
        c: Rat,
        p0: Grat,
    ) -> Result<Self> {
        let group = GroupPreset::new(preset);
        require_center(&group, &z)?;
        require_center(&group, &p0)?;
        if !r.is_positive() || r > Rat::new(BigInt::one(), BigInt::from(2)) {
            return Err(Error::InvalidQuery(
                "ball radius must lie in (0, 1/2]".into(),
            ));
        }
        if lambda <= Rat::one() || lambda > Rat::from_integer(BigInt::from(2)) {
            return Err(Error::InvalidQuery(
                "proximity exponent lambda must lie in (1, 2]".into(),
            ));
        }
        if c < Rat::one() {
            return Err(Error::InvalidQuery(
                "proximity constant c must be at least 1".into(),
            ));
        }
        let r_lambda = rat_pow(&r, &lambda).ok_or_else(|| {
            Error::InvalidQuery(
                "R^lambda is not exactly rational; pick R a perfect power matching \
                 lambda's denominator"
                    .into(),
            )
        })?;
        if lambda == Rat::from_integer(BigInt::from(2)) {
            let h = Rat::new(BigInt::one(), p0.den_norm());
            if &c * &h <= Rat::one() {
                return Err(Error::InvalidQuery(
                    "lambda = 2 requires c |H_p0| > 1".into(),
                ));
            }
        }
        Ok(ProximityQuery { preset, z, r, lambda, c, p0, r_lambda })
    }

    /// Exact test of `(|z - p0| + R)^2 <= c |H_p0| R^lambda - c^2 R^(2 lambda)`,
    /// evaluated in squared form to avoid the root of `|z - p0|`.
    pub fn hypothesis_met(&self) -> bool {
        let h = Rat::new(BigInt::one(), self.p0.den_norm());
        let crl = &self.c * &self.r_lambda;
        let d = &crl * &(h - &crl);
        if !d.is_positive() {
            return false;
        }
        let t2 = self.z.dist_sq(&self.p0);
        let r2 = &self.r * &self.r;
        let e = &d - &t2 - &r2;
        if e.is_negative() {
            return false;
        }
        let four = Rat::from_integer(BigInt::from(4));
        four * r2 * t2 <= &e * &e
    }
}

/// Outcome of one proximity query: the hypothesis status and the exact,
/// exhaustively certified number of qualifying horoballs meeting the ball.
#[derive(Debug, Clone)]
pub struct ProximityVerdict {
    pub hypothesis_met: bool,
    pub count: usize,
    pub witnesses: Vec<Grat>,
}

impl ProximityVerdict {
    /// The dichotomy: under the hypothesis at most one horoball qualifies.
    pub fn consistent(&self) -> bool {
        !self.hypothesis_met || self.count <= 1
    }
}

/// Enumerates every tangent point in `B(z, R)` whose horoball diameter is at
/// least `c R^lambda`. A failed hypothesis yields a verdict, not an error.
pub fn proximity_check(query: &ProximityQuery) -> Result<ProximityVerdict> {
    let hypothesis_met = query.hypothesis_met();
    let crl = &query.c * &query.r_lambda;
    let bound = rat_floor_u64(&crl.recip())?;
    let cap = match query.preset {
        PresetName::Modular => MODULAR_PROXIMITY_CAP,
        PresetName::Picard => PICARD_PROXIMITY_CAP,
    };
    if bound > cap {
        return Err(Error::InvalidQuery(format!(
            "proximity certification would scan norms up to {bound}, beyond the \
             supported cap {cap}"
        )));
    }
    let range = DenominatorRange::up_to(bound)?;
    let window = if query.preset == PresetName::Picard {
        let (zx, zy) = (query.z.re(), query.z.im());
        Window::rect(&zx - &query.r, &zx + &query.r, &zy - &query.r, &zy + &query.r)
    } else {
        let zx = query.z.re();
        Window::interval(&zx - &query.r, &zx + &query.r)
    };
    let r2 = &query.r * &query.r;
    let witnesses: Vec<Grat> = farey::enumerate_tangents(query.preset, &window, &range)?
        .into_iter()
        .filter(|p| p.dist_sq(&query.z) <= r2)
        .collect();
    Ok(ProximityVerdict { hypothesis_met, count: witnesses.len(), witnesses })
}

/// Aggregate of a randomized proximity sweep.
#[derive(Debug, Clone)]
pub struct ProximitySweep {
    pub preset: PresetName,
    pub queries: usize,
    pub violations: usize,
    pub max_count: usize,
    pub attempts: usize,
}

/// Nearest multiple of `2^-grid`; `|x| <= 2` and `grid <= 40` keep the
/// scaled value well inside `i64`.
fn snap_dyadic(x: f64, grid: u32) -> Rat {
    let scale = (1u64 << grid) as f64;
    Rat::new(BigInt::from((x * scale).round() as i64), BigInt::one() << grid)
}

/// Generates `n` seeded random hypothesis-satisfying proximity queries and
/// certifies each one exhaustively.
///
/// Radii are powers of `1/16` and exponents quarter-integers, so every
/// `R^lambda` is exactly dyadic; centers are dyadic offsets from a small
/// cusp, rejection-sampled until the exact hypothesis holds.
pub fn proximity_sweep(preset: PresetName, n: usize, seed: u64) -> Result<ProximitySweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas = [
        Rat::new(BigInt::from(5), BigInt::from(4)),
        Rat::new(BigInt::from(3), BigInt::from(2)),
        Rat::new(BigInt::from(7), BigInt::from(4)),
        Rat::from_integer(BigInt::from(2)),
    ];
    let cusps: Vec<Grat> = match preset {
        PresetName::Modular => [(0, 1), (1, 1), (1, 2), (1, 3), (2, 3), (1, 4)]
            .into_iter()
            .map(|(p, q)| Grat::from_rat(&Rat::new(BigInt::from(p), BigInt::from(q))))
            .collect(),
        PresetName::Picard => {
            use crate::arith::Gint;
            vec![
                Grat::from_int(0),
                Grat::new(Gint::one(), Gint::new(1, 1)),
                Grat::new(Gint::one(), Gint::from_int(2)),
                Grat::new(Gint::i(), Gint::from_int(2)),
            ]
        }
    };
    // Norm bound 1/(c R^lambda) <= 16^(m lambda) must stay under the
    // proximity cap: limit the depth m per exponent.
    let cap_log2: u32 = match preset {
        PresetName::Modular => 20,
        PresetName::Picard => 12,
    };
    let mut sweep = ProximitySweep {
        preset,
        queries: 0,
        violations: 0,
        max_count: 0,
        attempts: 0,
    };
    while sweep.queries < n {
        sweep.attempts += 1;
        if sweep.attempts > 60 * n + 1000 {
            return Err(Error::TooFewSamples(format!(
                "proximity sweep accepted only {} of {n} queries",
                sweep.queries
            )));
        }
        let lambda = &lambdas[rng.gen_range(0..lambdas.len())];
        let p0 = &cusps[rng.gen_range(0..cusps.len())];
        let lambda_f = rat_f64(lambda);
        let m_max = ((cap_log2 as f64) / (4.0 * lambda_f)).floor() as u32;
        if m_max == 0 {
            continue;
        }
        let m = rng.gen_range(1..=m_max);
        let r = Rat::new(BigInt::one(), BigInt::from(16u64).pow(m));
        let h = Rat::new(BigInt::one(), p0.den_norm());
        let c = if *lambda == Rat::from_integer(BigInt::from(2)) {
            // Strict constant condition: c |H| in (1, 4].
            let j = rng.gen_range(1..=12u64);
            h.recip() * Rat::new(BigInt::from(4 + j), BigInt::from(4))
        } else {
            let j = rng.gen_range(0..=12u64);
            Rat::new(BigInt::from(4 + j), BigInt::from(4))
        };
        let r_lambda = rat_pow(&r, lambda).expect("power-of-16 radius");
        let crl = &c * &r_lambda;
        let d = &crl * &(&h - &crl);
        let r2 = &r * &r;
        if d <= r2 {
            continue;
        }
        let t_max = rat_f64(&d).sqrt() - rat_f64(&r);
        if t_max <= 0.0 {
            continue;
        }
        let t = rng.gen_range(0.0..0.95) * t_max;
        // Offsets snap to a dyadic grid a few octaves below R so window
        // endpoints keep small denominators; the exact hypothesis test
        // below is still the gate.
        let grid = 4 * m + 12;
        let z = if preset == PresetName::Picard {
            let angle = rng.gen_range(0..8) as f64 * std::f64::consts::FRAC_PI_4;
            let dx = snap_dyadic(t * angle.cos(), grid);
            let dy = snap_dyadic(t * angle.sin(), grid);
            Grat::from_parts(&(p0.re() + dx), &(p0.im() + dy))
        } else {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Grat::from_rat(&(p0.re() + snap_dyadic(sign * t, grid)))
        };
        let query = ProximityQuery::new(preset, z, r, lambda.clone(), c, p0.clone())?;
        if !query.hypothesis_met() {
            continue;
        }
        let verdict = proximity_check(&query)?;
        sweep.queries += 1;
        sweep.max_count = sweep.max_count.max(verdict.count);
        if !verdict.consistent() {
            sweep.violations += 1;
        }
    }
    Ok(sweep)
}

/// One row of the continuity table: mass ratios at a single exponent.
#[derive(Debug, Clone)]
pub struct ContinuityRow {
    pub s: f64,
    /// `mu_s(B) / mu_delta(B)` using the certified lower bound at the cutoff.
    pub raw_ratio: f64,
    /// Same ratio with the dominant atom's weight removed, when a cusp of
    /// horoball diameter above `2R` lies in the ball.
    pub atom_removed_ratio: Option<f64>,
}

/// Mass ratios `mu_s(B)/mu_delta(B)` along a sequence of exponents
/// decreasing toward `delta`.
#[derive(Debug, Clone)]
pub struct ContinuityTable {
    pub rows: Vec<ContinuityRow>,
    /// The unique cusp in the ball with `|H_p| > 2R`, if any (disjointness
    /// allows at most one).
    pub dominant_atom: Option<Grat>,
}

/// Tabulates atom-sensitive mass ratios for `s` descending toward `delta`.
///
/// `s = delta` itself is rejected (the atomic series diverges there). Ratios
/// use the truncated lower bound at the supplied denominator cutoff, so the
/// table is descriptive; the certified interval narrows as `q_cut` grows.
pub fn continuity_experiment(
    preset: PresetName,
    z: &Grat,
    r: &Rat,
    s_list: &[f64],
    q_cut: u64,
) -> Result<ContinuityTable> {
    let group = GroupPreset::new(preset);
    if s_list.is_empty() {
        return Err(Error::TooFewSamples("continuity needs at least one exponent".into()));
    }
    for pair in s_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidQuery(
                "continuity exponents must strictly decrease toward delta".into(),
            ));
        }
    }
    for &s in s_list {
        validate_exponent(&group, s)?;
    }
    let base = mu_delta_ball(&group, z, r)?;
    // A cusp with |H_p| > 2R, i.e. norm < 1/(2R); disjointness makes it
    // unique in the ball when it exists.
    let half_inv = (r + r).recip();
    let atom_bound = {
        let f = half_inv.floor();
        let n = if f == half_inv { f - Rat::one() } else { f };
        n.to_integer().to_u64().unwrap_or(0)
    };
    let dominant = if atom_bound >= 1 {
        largest_tangent_in_ball(&group, z, r, atom_bound)?
    } else {
        None
    };
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let mass = mu_s_ball(&group, z, r, s, q_cut)?;
        let raw_ratio = mass.lower / base;
        let atom_removed_ratio = match &dominant {
            Some((p, _)) => Some((mass.lower - atom_weight(&group, p, s)?) / base),
            None => None,
        };
        rows.push(ContinuityRow { s, raw_ratio, atom_removed_ratio });
    }
    Ok(ContinuityTable {
        rows,
        dominant_atom: dominant.map(|(p, _)| p),
    })
}

/// Calibrated experiment constants for one preset, as committed fixtures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub preset: String,
    pub tau: (i64, i64),
    pub c_window: (i64, i64),
    pub c1: (i64, i64),
    pub c2: (i64, i64),
    pub local_band: f64,
    pub intermediate_band: f64,
}

fn pair_rat(pair: (i64, i64)) -> Rat {
    Rat::new(BigInt::from(pair.0), BigInt::from(pair.1))
}

impl Calibration {
    pub fn tau_rat(&self) -> Rat {
        pair_rat(self.tau)
    }

    pub fn c_window_rat(&self) -> Rat {
        pair_rat(self.c_window)
    }

    pub fn c1_rat(&self) -> Rat {
        pair_rat(self.c1)
    }

    pub fn c2_rat(&self) -> Rat {
        pair_rat(self.c2)
    }
}

const MODULAR_FIXTURE: &str = include_str!("../fixtures/calibration_modular.json");
const PICARD_FIXTURE: &str = include_str!("../fixtures/calibration_picard.json");

/// The committed calibration for a preset. Experiments compare fresh bands
/// against these and fail when the observed band exceeds twice the fixture.
pub fn calibration_fixture(preset: PresetName) -> Result<Calibration> {
    let raw = match preset {
        PresetName::Modular => MODULAR_FIXTURE,
        PresetName::Picard => PICARD_FIXTURE,
    };
    let cal: Calibration = serde_json::from_str(raw)?;
    if cal.preset != preset.to_string() {
        return Err(Error::Fixture(format!(
            "fixture preset `{}` does not match `{preset}`",
            cal.preset
        )));
    }
    Ok(cal)
}

fn rat_pair(x: &Rat) -> (i64, i64) {
    (
        x.numer().to_i64().expect("calibration constants are small"),
        x.denom().to_i64().expect("calibration constants are small"),
    )
}

/// Grid-searches `(tau, C)` for the tightest local band, then finds the
/// widest intermediate hypothesis window `(c1, c2)` whose lower bound holds.
///
/// Uses the preset's standard center/radius grid; see `calibrate_on_grid`
/// for explicit grids.
pub fn calibrate(preset: PresetName, tau_candidates: &[Rat]) -> Result<Calibration> {
    let (z_list, r_list) = match preset {
        PresetName::Modular => (
            centers::modular_centers(),
            vec![
                Rat::new(BigInt::one(), BigInt::from(16)),
                Rat::new(BigInt::one(), BigInt::from(32)),
                Rat::new(BigInt::one(), BigInt::from(64)),
            ],
        ),
        PresetName::Picard => (
            centers::picard_calibration_centers(),
            vec![
                Rat::new(BigInt::one(), BigInt::from(8)),
                Rat::new(BigInt::one(), BigInt::from(16)),
            ],
        ),
    };
    calibrate_on_grid(preset, tau_candidates, &z_list, &r_list)
}

/// Calibration over an explicit grid of centers and radii.
pub fn calibrate_on_grid(
    preset: PresetName,
    tau_candidates: &[Rat],
    z_list: &[Grat],
    r_list: &[Rat],
) -> Result<Calibration> {
    if z_list.len() < 2 {
        return Err(Error::TooFewSamples(
            "calibration grid needs at least two distinct centers".into(),
        ));
    }
    if tau_candidates.is_empty() {
        return Err(Error::TooFewSamples("no tau candidates supplied".into()));
    }
    let c_candidates: Vec<Rat> = match preset {
        PresetName::Modular => [(1, 1), (1, 2), (1, 4), (1, 8), (1, 16)],
        PresetName::Picard => [(1, 1), (1, 2), (1, 4), (1, 8), (1, 16)],
    }
    .iter()
    .map(|&(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
    .collect();
    let depth = match preset {
        PresetName::Modular => 4,
        PresetName::Picard => 2,
    };

    let mut best: Option<(f64, Rat, Rat)> = None;
    let mut diagnostics = Vec::new();
    for tau in tau_candidates {
        if !tau.is_positive() || *tau >= Rat::one() {
            return Err(Error::InvalidQuery(
                "scale base tau must lie in (0, 1)".into(),
            ));
        }
        for c_window in &c_candidates {
            let exp = match local_count_experiment(preset, z_list, r_list, tau, c_window, depth)
            {
                Ok(exp) => exp,
                Err(_) => continue,
            };
            if exp.records.len() < 8 {
                continue;
            }
            let spread = exp.band.spread();
            diagnostics.push(format!("tau={tau} C={c_window} spread={spread:.3}"));
            if best.as_ref().map_or(true, |(b, _, _)| spread < *b) {
                best = Some((spread, tau.clone(), c_window.clone()));
            }
        }
    }
    let (local_band, tau, c_window) = best.ok_or_else(|| {
        Error::CalibrationFailure("no (tau, C) candidate produced enough local bands".into())
    })?;
    if local_band > CALIBRATION_TARGET {
        return Err(Error::CalibrationFailure(format!(
            "best local band {local_band:.2} exceeds target {CALIBRATION_TARGET}; tried: {}",
            diagnostics.join("; ")
        )));
    }

    // Widest admissible hypothesis window: smallest c1, then largest c2,
    // such that the intermediate lower bound holds across the witness family.
    let c1_grid = [(5i64, 4i64), (3, 2), (2, 1), (3, 1)];
    let c2_grid = [(9i64, 10i64), (3, 4), (1, 2), (1, 4)];
    let z0 = match preset {
        PresetName::Modular => centers::golden().clone(),
        PresetName::Picard => centers::picard_calibration_centers()[0].clone(),
    };
    let n_range = match preset {
        PresetName::Modular => 12..=48,
        PresetName::Picard => 12..=36,
    };
    let mut chosen = None;
    'search: for &(c1n, c1d) in &c1_grid {
        for &(c2n, c2d) in &c2_grid {
            let c1 = Rat::new(BigInt::from(c1n), BigInt::from(c1d));
            let c2 = Rat::new(BigInt::from(c2n), BigInt::from(c2d));
            let family = intermediate_family(preset, &z0, &tau, &c1, &c2, n_range.clone())?;
            if family.len() < 20 {
                continue;
            }
            let records: Result<Vec<_>> = family.iter().map(intermediate_experiment).collect();
            let records = records?;
            let band = band_fit(&records)?;
            if band.spread() <= CALIBRATION_TARGET
                && band.c_lo >= 1.0 / CALIBRATION_TARGET
            {
                chosen = Some((c1, c2, band.spread()));
                break 'search;
            }
        }
    }
    let (c1, c2, intermediate_band) = chosen.ok_or_else(|| {
        Error::CalibrationFailure(
            "no (c1, c2) hypothesis window sustained the intermediate lower bound".into(),
        )
    })?;

    Ok(Calibration {
        preset: preset.to_string(),
        tau: rat_pair(&tau),
        c_window: rat_pair(&c_window),
        c1: rat_pair(&c1),
        c2: rat_pair(&c2),
        local_band,
        intermediate_band,
    })
}
