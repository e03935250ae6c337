//! End-to-end verification suite: nine numbered criteria, each with a pinned
//! tolerance, runnable one at a time or all together. The `acceptance`
//! integration test and the CLI `verify` command are thin wrappers around
//! this module.
//!
//! The tolerances here are part of the suite's contract. A criterion that
//! cannot meet its stated bound fails; the bounds are not tuning knobs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{rat_f64, Gint, Grat, Rat};
use crate::centers;
use crate::counting::{
    band_fit, calibration_fixture, continuity_experiment, global_count,
    intermediate_experiment, intermediate_family, local_count_experiment, proximity_sweep,
};
use crate::dimension::{
    assouad_spectrum_estimate, box_dim_estimate, standard_center_grid, MeasureModel,
};
use crate::error::{Error, Result};
use crate::farey::{enumerate_tangents, Window};
use crate::measures::{global_formula_s, mu_delta_ball, mu_s_ball, rho_at_height};
use crate::moebius::{BoundaryPoint, GroupPreset, Horoball, MoebiusMap, PresetName};
use crate::orbit::{expand_orbit, ford_reference, OrbitRequest};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    /// Key figures on success, the first failures otherwise.
    pub detail: String,
}

impl CriterionReport {
    /// The one-line form printed by the test target and the CLI.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{} {}  {} ({})", self.id, verdict, self.title, self.detail)
    }
}

/// Criterion identifiers in execution order.
pub const CRITERION_IDS: [&str; 9] =
    ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9"];

/// Runs a single criterion by identifier (case-insensitive).
pub fn run_criterion(id: &str) -> Result<CriterionReport> {
    match id.to_ascii_uppercase().as_str() {
        "A1" => a1(),
        "A2" => a2(),
        "A3" => a3(),
        "A4" => a4(),
        "A5" => a5(),
        "A6" => a6(),
        "A7" => a7(),
        "A8" => a8(),
        "A9" => a9(),
        other => Err(Error::InvalidQuery(format!(
            "unknown criterion {other:?}; expected one of A1..A9"
        ))),
    }
}

/// Runs every criterion in order. Infrastructure errors abort the run;
/// tolerance failures are reported, not raised.
pub fn run_all() -> Result<Vec<CriterionReport>> {
    CRITERION_IDS.iter().map(|id| run_criterion(id)).collect()
}

// ---------------------------------------------------------------------------
// Bookkeeping.

struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { failures: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, msg: String) {
        if !ok {
            self.failures.push(msg);
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }

    fn report(self, id: &'static str, title: &'static str) -> CriterionReport {
        let passed = self.failures.is_empty();
        let detail = if passed { self.notes.join("; ") } else { self.failures.join("; ") };
        CriterionReport { id, title, passed, detail }
    }
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn dyadic(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << k)
}

/// Min, max, and max/min over a nonempty list of positive finite values.
fn value_band(vals: &[f64]) -> Result<(f64, f64, f64)> {
    if vals.is_empty() {
        return Err(Error::TooFewSamples("band over an empty value list".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &v in vals {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidQuery(format!(
                "band requires positive finite values, got {v}"
            )));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi, hi / lo))
}

// ---------------------------------------------------------------------------
// A1: orbit expansion equals the closed-form family, both presets.

fn a1() -> Result<CriterionReport> {
    let mut c = Checks::new();

    let modular = GroupPreset::modular();
    let window = Window::interval(Rat::zero(), Rat::one());
    let min_diam = rat(1, 2500);
    let got = expand_orbit(&OrbitRequest::for_preset(&modular, window.clone(), min_diam.clone()))?;
    let ford = ford_reference(&modular, &window, &min_diam)?;
    c.require(!got.truncated, "modular orbit expansion truncated".into());
    c.require(
        got.shapes() == ford.shapes(),
        format!(
            "modular orbit/ford mismatch: {} vs {} balls",
            got.count(),
            ford.count()
        ),
    );
    c.note(format!("modular {} balls", got.count()));

    let picard = GroupPreset::picard();
    let box_window = Window::rect(Rat::zero(), Rat::one(), Rat::zero(), Rat::one());
    let min_diam = rat(1, 12);
    let got = expand_orbit(&OrbitRequest::for_preset(&picard, box_window.clone(), min_diam.clone()))?;
    let ford = ford_reference(&picard, &box_window, &min_diam)?;
    c.require(!got.truncated, "picard orbit expansion truncated".into());
    c.require(
        got.shapes() == ford.shapes(),
        format!(
            "picard orbit/ford mismatch: {} vs {} balls",
            got.count(),
            ford.count()
        ),
    );
    c.note(format!("picard {} balls", got.count()));
    c.note("0 discrepancies".into());

    Ok(c.report("A1", "orbit expansion matches the closed-form horoball family"))
}

// ---------------------------------------------------------------------------
// A2: global band counts grow at the boundary dimension.

fn a2() -> Result<CriterionReport> {
    let mut c = Checks::new();
    let half = rat(1, 2);

    let fit = global_count(PresetName::Modular, &half, 8..=20)?;
    c.require(
        (0.95..=1.05).contains(&fit.slope),
        format!("modular slope {:.4} outside [0.95, 1.05]", fit.slope),
    );
    let spread = fit.band.spread();
    c.require(spread <= 10.0, format!("modular band spread {spread:.2} > 10"));
    c.note(format!("modular slope {:.4}, band spread {:.2}", fit.slope, spread));

    let fit = global_count(PresetName::Picard, &half, 4..=12)?;
    c.require(
        (1.9..=2.1).contains(&fit.slope),
        format!("picard slope {:.4} outside [1.9, 2.1]", fit.slope),
    );
    c.note(format!("picard slope {:.4}", fit.slope));

    Ok(c.report("A2", "global band counts grow at the boundary dimension"))
}

// ---------------------------------------------------------------------------
// A3: local-regime counts in one band, cross-checked against enumeration.

fn a3() -> Result<CriterionReport> {
    let mut c = Checks::new();
    let cal = calibration_fixture(PresetName::Modular)?;
    let tau = cal.tau_rat();
    let z_list = centers::modular_centers();
    let r_list: Vec<Rat> = (4..=8).map(dyadic).collect();
    let exp = local_count_experiment(
        PresetName::Modular,
        &z_list,
        &r_list,
        &tau,
        &cal.c_window_rat(),
        20,
    )?;
    c.require(exp.skipped == 0, format!("{} grid points skipped", exp.skipped));
    let spread = exp.band.spread();
    c.require(spread <= 20.0, format!("band spread {spread:.3} > 20"));

    // Independent route: explicit tangent enumeration with an exact distance
    // filter, on every record whose band norms stay below 2^20.
    let shallow_cap = Rat::from_integer(BigInt::one() << 20);
    let mut checked = 0usize;
    for rec in &exp.records {
        let norm_hi = (rec.query.tau_k() * &tau).recip();
        if norm_hi > shallow_cap {
            continue;
        }
        let range = rec.query.band_range()?;
        let zre = rec.query.z.re();
        let window = Window::interval(&zre - &rec.query.r, &zre + &rec.query.r);
        let r2 = &rec.query.r * &rec.query.r;
        let brute = enumerate_tangents(PresetName::Modular, &window, &range)?
            .into_iter()
            .filter(|p| p.dist_sq(&rec.query.z) <= r2)
            .count();
        c.require(
            BigInt::from(brute) == rec.count,
            format!(
                "sieve count {} != enumerated count {} at z={}, R={}, k={}",
                rec.count, brute, rec.query.z, rec.query.r, rec.query.k
            ),
        );
        checked += 1;
    }
    c.require(checked > 0, "no record was shallow enough to enumerate".into());
    c.note(format!(
        "{} records, band spread {:.3}, {} enumeration-checked",
        exp.records.len(),
        spread,
        checked
    ));

    Ok(c.report("A3", "local-regime counts stay in one comparability band"))
}

// ---------------------------------------------------------------------------
// A4: proximity dichotomy on 10^4 random certified queries.

fn a4() -> Result<CriterionReport> {
    let mut c = Checks::new();
    for (preset, n, seed) in [
        (PresetName::Modular, 7000usize, 41u64),
        (PresetName::Picard, 3000, 42),
    ] {
        let sweep = proximity_sweep(preset, n, seed)?;
        c.require(
            sweep.queries == n,
            format!("{preset}: accepted {} of {n} queries", sweep.queries),
        );
        c.require(
            sweep.violations == 0,
            format!("{preset}: {} queries met more than one ball", sweep.violations),
        );
        c.require(
            sweep.max_count <= 1,
            format!("{preset}: max qualifying count {}", sweep.max_count),
        );
        c.note(format!(
            "{preset} {} queries, {} attempts, 0 violations",
            sweep.queries, sweep.attempts
        ));
    }
    Ok(c.report("A4", "proximity dichotomy holds on random certified queries"))
}

// ---------------------------------------------------------------------------
// A5: intermediate-regime counts along a cusp-approach orbit.

fn a5() -> Result<CriterionReport> {
    let mut c = Checks::new();
    let cal = calibration_fixture(PresetName::Modular)?;
    let family = intermediate_family(
        PresetName::Modular,
        centers::golden(),
        &cal.tau_rat(),
        &cal.c1_rat(),
        &cal.c2_rat(),
        12..=120,
    )?;
    c.require(
        family.len() >= 50,
        format!("only {} hypothesis-satisfying queries, need 50", family.len()),
    );
    let records = family
        .iter()
        .map(intermediate_experiment)
        .collect::<Result<Vec<_>>>()?;
    let band = band_fit(&records)?;
    let spread = band.spread();
    c.require(spread <= 50.0, format!("band spread {spread:.3} > 50"));
    c.note(format!("{} queries, band spread {:.3}", records.len(), spread));
    Ok(c.report("A5", "intermediate-regime counts stay in one comparability band"))
}

// ---------------------------------------------------------------------------
// A6: certified conformal masses against the three-term global formula.

fn a6() -> Result<CriterionReport> {
    let mut c = Checks::new();
    let group = GroupPreset::modular();
    let cal = calibration_fixture(PresetName::Modular)?;
    let tau = cal.tau_rat();
    let c_window = cal.c_window_rat();
    let delta = group.delta();

    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = 0.0f64;
    // Normalized second terms, split at the fit boundary: the constant is
    // fitted on the two coarsest radii and must keep working on the rest.
    let mut coarse_m = 0.0f64;
    let mut deep_m = 0.0f64;
    let mut combos = 0usize;
    for s in [1.1, 1.25, 1.5] {
        for z in centers::modular_centers() {
            for k in 6..=12u32 {
                let r = dyadic(k);
                let q_cut = 32u64 << k;
                let mass = mu_s_ball(&group, &z, &r, s, q_cut)?;
                let terms = global_formula_s(&group, &z, &r, s, &tau, &c_window)?;
                let total = terms.total();
                c.require(
                    total > 0.0 && mass.lower > 0.0,
                    format!("degenerate mass at z={z}, R=2^-{k}, s={s}"),
                );
                if total > 0.0 && mass.lower > 0.0 {
                    ratio_lo = ratio_lo.min(mass.lower / total);
                    ratio_hi = ratio_hi.max(mass.upper / total);
                }
                let scale = rat_f64(&r).powf(s - delta) * mu_delta_ball(&group, &z, &r)?;
                let m = terms.term2 / scale;
                if k <= 7 {
                    coarse_m = coarse_m.max(m);
                } else {
                    deep_m = deep_m.max(m);
                }
                combos += 1;
            }
        }
    }
    let spread = ratio_hi / ratio_lo;
    c.require(
        spread <= 50.0,
        format!("mass/formula band {spread:.3} > 50 over {combos} combos"),
    );
    // Truncating the band sum at C R^2 can cost at most the tail of the
    // geometric series in tau^(s - delta); with five or more bands present
    // at the coarse radii that tail is under half the sum, so twice the
    // coarse maximum bounds every deeper normalized second term.
    let fitted = 2.0 * coarse_m;
    c.require(
        deep_m <= fitted,
        format!("second term ratio {deep_m:.4} exceeds fitted constant {fitted:.4}"),
    );
    c.note(format!(
        "{combos} combos, mass/formula band {spread:.3}, second-term constant {fitted:.3}"
    ));
    Ok(c.report("A6", "conformal ball masses match the three-term formula"))
}

// ---------------------------------------------------------------------------
// A7: continuity of mass ratios off atoms, atomic blowup at a cusp.

fn a7() -> Result<CriterionReport> {
    let mut c = Checks::new();
    let r = rat(1, 64);
    let s_list = [1.2, 1.1, 1.05, 1.01];
    let q_cut = 4096;

    let table = continuity_experiment(PresetName::Modular, centers::golden(), &r, &s_list, q_cut)?;
    let raw: Vec<f64> = table.rows.iter().map(|row| row.raw_ratio).collect();
    let (_, _, spread) = value_band(&raw)?;
    c.require(
        spread <= 50.0,
        format!("raw ratio band {spread:.3} > 50 at a badly approximable center"),
    );
    c.require(
        table.dominant_atom.is_none(),
        "unexpected dominant atom at a badly approximable center".into(),
    );
    c.note(format!("off-atom band {spread:.3}"));

    let table = continuity_experiment(PresetName::Modular, &Grat::zero(), &r, &s_list, q_cut)?;
    c.require(
        table.dominant_atom.is_some(),
        "no dominant atom found at the cusp".into(),
    );
    let removed: Vec<f64> = table
        .rows
        .iter()
        .filter_map(|row| row.atom_removed_ratio)
        .collect();
    c.require(
        removed.len() == table.rows.len(),
        "atom-removed ratio missing on some rows".into(),
    );
    let (_, _, spread) = value_band(&removed)?;
    c.require(
        spread <= 50.0,
        format!("atom-removed band {spread:.3} > 50 at the cusp"),
    );
    let raw: Vec<f64> = table.rows.iter().map(|row| row.raw_ratio).collect();
    let monotone = raw.windows(2).all(|w| w[1] > w[0]);
    c.require(
        monotone,
        format!("raw cusp ratios not increasing toward delta: {raw:?}"),
    );
    c.note(format!(
        "cusp atom-removed band {spread:.3}, raw ratio grows {:.1} -> {:.1}",
        raw.first().copied().unwrap_or(f64::NAN),
        raw.last().copied().unwrap_or(f64::NAN)
    ));

    Ok(c.report("A7", "mass ratios are continuous off atoms and atomic at cusps"))
}

// ---------------------------------------------------------------------------
// A8: dimension estimators on the atomic model at s = 1.25.

fn a8() -> Result<CriterionReport> {
    let mut c = Checks::new();
    let model = MeasureModel::Conformal { preset: PresetName::Modular, s: 1.25 };

    let box_ladder: Vec<Rat> = (5..=12).map(dyadic).collect();
    let grid = standard_center_grid(PresetName::Modular, &box_ladder);
    let est = box_dim_estimate(&model, &box_ladder, &grid)?;
    c.require(
        (1.35..=1.65).contains(&est.upper),
        format!("box dimension {:.4} outside [1.35, 1.65]", est.upper),
    );
    c.require(
        est.lower <= est.upper,
        format!("estimator sandwich violated: {:.4} > {:.4}", est.lower, est.upper),
    );
    c.note(format!("box {:.4} (target {})", est.upper, est.target));

    let spec_ladder: Vec<Rat> = (4..=12).map(dyadic).collect();
    let spec_grid = standard_center_grid(PresetName::Modular, &spec_ladder);
    let quarter = assouad_spectrum_estimate(&model, &rat(1, 4), &spec_ladder, &spec_grid)?;
    c.require(
        (1.75..=2.25).contains(&quarter.estimate),
        format!("spectrum at theta=1/4 is {:.4}, outside [1.75, 2.25]", quarter.estimate),
    );
    let half = assouad_spectrum_estimate(&model, &rat(1, 2), &spec_ladder, &spec_grid)?;
    c.require(
        (2.7..=3.3).contains(&half.estimate),
        format!("spectrum at theta=1/2 is {:.4}, outside [2.7, 3.3]", half.estimate),
    );
    let deep = assouad_spectrum_estimate(&model, &rat(3, 4), &spec_ladder, &spec_grid)?;
    c.require(
        quarter.estimate < half.estimate && half.estimate < deep.estimate,
        format!(
            "spectrum not increasing in theta: {:.3}, {:.3}, {:.3}",
            quarter.estimate, half.estimate, deep.estimate
        ),
    );
    c.note(format!(
        "spectrum {:.3} / {:.3} / {:.3} at theta 1/4, 1/2, 3/4",
        quarter.estimate, half.estimate, deep.estimate
    ));

    Ok(c.report("A8", "dimension estimators land on the documented values"))
}

// ---------------------------------------------------------------------------
// A9: independent oracles for the horoball image law and penetration depth.

/// Three rational points on the boundary circle of a finite ball in the
/// half-plane, none of them the tangency point: rational-slope parameters
/// 1, 2, 1/2 on the circle of diameter `t` over `p`.
fn source_circle_points(p: &Rat, t: &Rat) -> [(Rat, Rat); 3] {
    let top = (p.clone(), t.clone());
    let left = (p - &(t * &rat(3, 10)), t * &rat(9, 10));
    let right = (p + &(t * &rat(3, 10)), t * &rat(9, 10));
    [top, left, right]
}

/// Exact circle through three points: center and squared radius, or None if
/// the points are collinear.
fn circle_through(pts: &[(Rat, Rat); 3]) -> Option<((Rat, Rat), Rat)> {
    let [(x1, y1), (x2, y2), (x3, y3)] = pts;
    let two = Rat::from_integer(BigInt::from(2));
    let d = &two
        * &(&(x1 * &(y2 - y3)) + &(x2 * &(y3 - y1)) + (x3 * &(y1 - y2)));
    if d.is_zero() {
        return None;
    }
    let n1 = x1 * x1 + y1 * y1;
    let n2 = x2 * x2 + y2 * y2;
    let n3 = x3 * x3 + y3 * y3;
    let ux = (&(&n1 * &(y2 - y3)) + &(&n2 * &(y3 - y1)) + (&n3 * &(y1 - y2))) / &d;
    let uy = (&(&n1 * &(x3 - x2)) + &(&n2 * &(x1 - x3)) + (&n3 * &(x2 - x1))) / &d;
    let dx = x1 - &ux;
    let dy = y1 - &uy;
    let r2 = &dx * &dx + &dy * &dy;
    Some(((ux, uy), r2))
}

/// Extended Euclid over the Gaussian integers: returns `(g, x, y)` with
/// `a x + b y = g` and `g` a greatest common divisor (a unit for coprime
/// inputs). Plain integers are the imaginary-part-zero case.
fn gint_xgcd(a: &Gint, b: &Gint) -> (Gint, Gint, Gint) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut x0, mut x1) = (Gint::one(), Gint::zero());
    let (mut y0, mut y1) = (Gint::zero(), Gint::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_round(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let nx = &x0 - &(&q * &x1);
        x0 = std::mem::replace(&mut x1, nx);
        let ny = &y0 - &(&q * &y1);
        y0 = std::mem::replace(&mut y1, ny);
    }
    (r0, x0, y0)
}

/// Unimodular map sending the reduced cusp `num/den` to infinity, built by
/// extended Euclid; the bottom row is `(-den, num)`.
fn cusp_to_infinity(num: &Gint, den: &Gint) -> Result<MoebiusMap> {
    let (g, x, y) = gint_xgcd(num, den);
    if !g.is_unit() {
        return Err(Error::InvalidQuery(format!(
            "cusp {num}/{den} is not reduced (gcd {g})"
        )));
    }
    // The inverse of a Gaussian unit is its conjugate.
    let gi = g.conj();
    MoebiusMap::new(&x * &gi, &y * &gi, -den, num.clone())
}

fn random_modular_map(rng: &mut ChaCha8Rng) -> MoebiusMap {
    let t = MoebiusMap::translation(Gint::one());
    let t_inv = t.inverse();
    let s = MoebiusMap::inversion();
    let len = rng.gen_range(1..=12);
    let mut m = MoebiusMap::identity();
    for _ in 0..len {
        m = match rng.gen_range(0..3u8) {
            0 => m.compose(&t),
            1 => m.compose(&t_inv),
            _ => m.compose(&s),
        };
    }
    m
}

fn a9() -> Result<CriterionReport> {
    let mut c = Checks::new();

    // Random unimodular maps applied to random Ford circles; the image law
    // is checked against the circle through three exactly-mapped boundary
    // points. The fit is exact, so the 1e-9 relative gate is a formality.
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut max_rel = 0.0f64;
    let mut infinity_cases = 0usize;
    for case in 0..1000 {
        let m = random_modular_map(&mut rng);
        let q = rng.gen_range(1..=60u64);
        let p = loop {
            let cand = rng.gen_range(0..=q);
            if cand.gcd(&q) == 1 {
                break cand;
            }
        };
        let tangent = Rat::new(BigInt::from(p), BigInt::from(q));
        let diam = Rat::new(BigInt::one(), BigInt::from(q * q));
        let ball = Horoball::finite(Grat::from_rat(&tangent), diam.clone());
        let img = m.horoball_image(&ball);
        let mapped: Vec<(Rat, Rat)> = source_circle_points(&tangent, &diam)
            .iter()
            .map(|(x, y)| {
                let (ix, iy) = m.apply_interior(&Grat::from_rat(x), y);
                (ix.re(), iy)
            })
            .collect();
        let pts = [mapped[0].clone(), mapped[1].clone(), mapped[2].clone()];
        match img.tangent() {
            BoundaryPoint::Infinity => {
                infinity_cases += 1;
                let h = img.size();
                let flat = pts.iter().all(|(_, y)| y == h);
                c.require(
                    circle_through(&pts).is_none() && flat,
                    format!("case {case}: image at infinity but points off the plane"),
                );
            }
            BoundaryPoint::Finite(pt) => {
                let Some(((ux, uy), r2)) = circle_through(&pts) else {
                    c.require(false, format!("case {case}: image points collinear"));
                    continue;
                };
                let exact_tangent = pt.re();
                let exact_diam = img.size().clone();
                let tangency = &uy + &uy == exact_diam && r2 == &uy * &uy;
                c.require(
                    ux == exact_tangent && tangency,
                    format!("case {case}: fitted circle disagrees with image law"),
                );
                let dt = (rat_f64(&ux) - rat_f64(&exact_tangent)).abs()
                    / rat_f64(&exact_tangent).abs().max(1.0);
                let dd = ((rat_f64(&uy) * 2.0 - rat_f64(&exact_diam))
                    / rat_f64(&exact_diam))
                .abs();
                max_rel = max_rel.max(dt).max(dd);
            }
        }
    }
    c.require(
        max_rel <= 1e-9,
        format!("circle-fit relative deviation {max_rel:.3e} > 1e-9"),
    );
    c.note(format!(
        "1000 image cases ({infinity_cases} at infinity), max relative deviation {max_rel:.1e}"
    ));

    // Penetration depth against the conjugation route: map the probe with an
    // independently constructed cusp-to-infinity matrix and read the height
    // against the base ball. Equality is exact rational equality.
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let modular = GroupPreset::modular();
    let picard = GroupPreset::picard();
    let mut exact_matches = 0usize;
    for case in 0..100 {
        let (preset, p_int, q_int) = if case < 60 {
            let q = rng.gen_range(2..=40u64);
            let p = loop {
                let cand = rng.gen_range(1..q);
                if cand.gcd(&q) == 1 {
                    break cand;
                }
            };
            (&modular, Gint::from_int(p as i64), Gint::from_int(q as i64))
        } else {
            loop {
                let q = Gint::new(rng.gen_range(1..=4i64), rng.gen_range(0..=4i64));
                let p = Gint::new(rng.gen_range(-4..=4i64), rng.gen_range(-4..=4i64));
                if !p.is_zero() && p.gcd(&q).is_unit() {
                    break (&picard, p, q);
                }
            }
        };
        let norm = q_int.norm();
        let cusp = Grat::new(p_int.clone(), q_int.clone());
        // Offset small enough to keep the probe inside the cusp's ball.
        let offset_den =
            Rat::from_integer(&norm * BigInt::from(4 * rng.gen_range(4..=9i64)));
        let offset = if preset.gaussian() {
            Grat::from_parts(
                &(rat(rng.gen_range(-3..=3), 1) / &offset_den),
                &(rat(rng.gen_range(-3..=3), 1) / &offset_den),
            )
        } else {
            Grat::from_rat(&(rat(rng.gen_range(-3..=3), 1) / &offset_den))
        };
        let z = &cusp + &offset;
        let height = Rat::new(BigInt::one(), &norm * BigInt::from(2));
        let probe = rho_at_height(preset, &z, &height)?;
        let found = probe
            .containing_cusp
            .as_ref()
            .and_then(|b| b.tangent().finite())
            .is_some_and(|t| t == &cusp);
        c.require(
            found,
            format!("case {case}: probe missed the engineered cusp {cusp}"),
        );
        let map = cusp_to_infinity(&p_int, &q_int)?;
        let (_, oracle) = map.apply_interior(&z, &height);
        c.require(
            oracle > Rat::one(),
            format!("case {case}: conjugated probe not inside the base ball"),
        );
        if probe.ratio == oracle {
            exact_matches += 1;
        } else {
            c.require(
                false,
                format!(
                    "case {case}: penetration ratio {} != conjugation oracle {}",
                    probe.ratio, oracle
                ),
            );
        }
    }
    c.note(format!("{exact_matches}/100 probes agree exactly"));

    Ok(c.report("A9", "horoball images and penetration depths match independent oracles"))
}
