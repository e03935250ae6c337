//! Breadth-first orbit expansion of seed horoballs under group generators,
//! with diameter pruning and region clipping.
//!
//! The walk applies generators and their inverses on the left, deduplicates by
//! tangent point, and expands a node only while its horoball stays at or above
//! the diameter threshold and its tangent stays inside the query region
//! inflated by a fixed margin. The margin is 6 rather than the ball's own
//! diameter: every reduced fraction in the region is reachable by a chain of
//! generator steps whose intermediate tangents stray less than 3 from the
//! region and whose denominators never exceed the target's, so a fixed margin
//! keeps the pruned walk complete where a diameter-sized margin does not
//! (deep chains pass through tangents just outside the window at full
//! threshold diameter). The result is clipped to the exact region afterwards.
//!
//! For the arithmetic presets the output equals the closed-form Ford family
//! from `ford_reference`; the equality is an oracle check, not a definition,
//! and both sides are exact.

use std::collections::{HashMap, VecDeque};

use num_traits::Signed;

use crate::arith::{Grat, Rat};
use crate::error::{Error, Result};
use crate::farey::{enumerate_tangents, DenominatorRange, Window};
use crate::moebius::{BoundaryPoint, GroupPreset, Horoball, MoebiusMap};

/// Fixed tangent-excursion margin for pruning; see the module docs.
const INFLATION_MARGIN: i64 = 6;

/// Default node budget; presets need a few tens of thousands of nodes at the
/// scales the experiments run at.
pub const DEFAULT_MAX_NODES: usize = 4_000_000;

/// Work order for `expand_orbit`.
#[derive(Clone, Debug)]
pub struct OrbitRequest {
    pub generators: Vec<MoebiusMap>,
    pub seeds: Vec<Horoball>,
    pub min_diameter: Rat,
    pub region: Window,
    pub max_nodes: usize,
}

impl OrbitRequest {
    /// Standard request: preset generators, the base horoball as seed.
    pub fn for_preset(preset: &GroupPreset, region: Window, min_diameter: Rat) -> Self {
        OrbitRequest {
            generators: preset.generators().to_vec(),
            seeds: vec![Horoball::base()],
            min_diameter,
            region,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// A horoball found by the walk, with the number of generator steps from the
/// seed (0 for seeds themselves; `ford_reference` reports 0 throughout).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitBall {
    pub ball: Horoball,
    pub word_length: u32,
}

/// Deduplicated family of horoballs with finite tangents inside the region,
/// sorted by tangent.
#[derive(Clone, Debug, Default)]
pub struct HoroballSet {
    pub balls: Vec<OrbitBall>,
    /// Set when `max_nodes` stopped the walk early; the family may be
    /// incomplete and the caller decides whether to proceed.
    pub truncated: bool,
    /// Set by the floating-point pipeline for generic generator sets.
    pub approximate: bool,
}

impl HoroballSet {
    pub fn count(&self) -> usize {
        self.balls.len()
    }

    pub fn min_diameter(&self) -> Option<&Rat> {
        self.balls.iter().map(|b| b.ball.size()).min()
    }

    pub fn max_diameter(&self) -> Option<&Rat> {
        self.balls.iter().map(|b| b.ball.size()).max()
    }

    /// Tangent/diameter pairs, the word-length-free view used for oracle
    /// comparisons.
    pub fn shapes(&self) -> Vec<(&BoundaryPoint, &Rat)> {
        self.balls
            .iter()
            .map(|b| (b.ball.tangent(), b.ball.size()))
            .collect()
    }
}

/// Exact disjointness of open interiors (tangency allowed). Finite balls of
/// diameters `t1, t2` at `p1, p2` are disjoint iff `|p1-p2|^2 >= t1 t2`; a
/// finite ball clears the half-space at infinity iff its diameter is at most
/// the plane height.
pub fn horoballs_disjoint(h1: &Horoball, h2: &Horoball) -> bool {
    match (h1.tangent(), h2.tangent()) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => h1.size() == h2.size(),
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(_)) => h2.size() <= h1.size(),
        (BoundaryPoint::Finite(_), BoundaryPoint::Infinity) => h1.size() <= h2.size(),
        (BoundaryPoint::Finite(p1), BoundaryPoint::Finite(p2)) => {
            p1.dist_sq(p2) >= h1.size() * h2.size()
        }
    }
}

fn inflated_contains(window: &Window, p: &Grat) -> bool {
    let m = Rat::from_integer(INFLATION_MARGIN.into());
    match window {
        Window::Interval { lo, hi } => {
            let re = p.re();
            re >= lo - &m && re <= hi + &m && p.im().abs() <= m
        }
        Window::Box { x, y } => {
            let re = p.re();
            let im = p.im();
            re >= &x.0 - &m && re <= &x.1 + &m && im >= &y.0 - &m && im <= &y.1 + &m
        }
    }
}

/// Expands the orbit of the seeds under the generators. See the module docs
/// for the pruning rule; the returned set contains every orbit horoball with
/// finite tangent in the region and diameter at least `min_diameter`, unless
/// `truncated` is set.
pub fn expand_orbit(req: &OrbitRequest) -> Result<HoroballSet> {
    if !req.min_diameter.is_positive() {
        return Err(Error::InvalidQuery("min_diameter must be positive".into()));
    }
    if req.max_nodes == 0 {
        return Err(Error::InvalidQuery("max_nodes must be positive".into()));
    }
    if req.generators.is_empty() {
        return Err(Error::InvalidQuery("no generators".into()));
    }

    let mut steps: Vec<MoebiusMap> = Vec::new();
    for g in &req.generators {
        let inv = g.inverse();
        if !steps.contains(g) {
            steps.push(g.clone());
        }
        if !steps.contains(&inv) {
            steps.push(inv);
        }
    }

    let expandable = |ball: &Horoball| match ball.tangent() {
        BoundaryPoint::Infinity => true,
        BoundaryPoint::Finite(p) => {
            ball.size() >= &req.min_diameter && inflated_contains(&req.region, p)
        }
    };

    let mut visited: HashMap<BoundaryPoint, (Horoball, u32)> = HashMap::new();
    let mut queue: VecDeque<BoundaryPoint> = VecDeque::new();
    let mut truncated = false;

    let admit =
        |ball: Horoball,
         depth: u32,
         visited: &mut HashMap<BoundaryPoint, (Horoball, u32)>,
         queue: &mut VecDeque<BoundaryPoint>| {
            if visited.contains_key(ball.tangent()) {
                return true;
            }
            if visited.len() >= req.max_nodes {
                return false;
            }
            let tangent = ball.tangent().clone();
            if expandable(&ball) {
                queue.push_back(tangent.clone());
            }
            visited.insert(tangent, (ball, depth));
            true
        };

    'walk: {
        for seed in &req.seeds {
            if !admit(seed.clone(), 0, &mut visited, &mut queue) {
                truncated = true;
                break 'walk;
            }
        }
        while let Some(tangent) = queue.pop_front() {
            let (ball, depth) = visited[&tangent].clone();
            for g in &steps {
                let img = g.horoball_image(&ball);
                if !admit(img, depth + 1, &mut visited, &mut queue) {
                    truncated = true;
                    break 'walk;
                }
            }
        }
    }

    let mut balls: Vec<OrbitBall> = visited
        .into_values()
        .filter(|(ball, _)| match ball.tangent() {
            BoundaryPoint::Infinity => false,
            BoundaryPoint::Finite(p) => {
                ball.size() >= &req.min_diameter && req.region.contains(p)
            }
        })
        .map(|(ball, word_length)| OrbitBall { ball, word_length })
        .collect();
    balls.sort_unstable_by(|a, b| {
        let (BoundaryPoint::Finite(pa), BoundaryPoint::Finite(pb)) =
            (a.ball.tangent(), b.ball.tangent())
        else {
            unreachable!()
        };
        pa.cmp_value(pb)
    });
    Ok(HoroballSet { balls, truncated, approximate: false })
}

/// Closed-form horoball family for a preset: tangents from the reduced
/// fraction enumeration, diameters `1/N(q)`, no group walk. Word lengths are
/// reported as 0.
pub fn ford_reference(
    preset: &GroupPreset,
    region: &Window,
    min_diameter: &Rat,
) -> Result<HoroballSet> {
    let range = DenominatorRange::for_min_diameter(min_diameter)?;
    let tangents = enumerate_tangents(preset.name(), region, &range)?;
    let balls = tangents
        .into_iter()
        .map(|p| {
            let diameter = Rat::from_integer(p.den_norm()).recip();
            OrbitBall { ball: Horoball::finite(p, diameter), word_length: 0 }
        })
        .collect();
    Ok(HoroballSet { balls, truncated: false, approximate: false })
}

// ---------------------------------------------------------------------------
// Floating-point pipeline for generic generator sets.

type C64 = (f64, f64);

fn cadd(a: C64, b: C64) -> C64 {
    (a.0 + b.0, a.1 + b.1)
}
fn csub(a: C64, b: C64) -> C64 {
    (a.0 - b.0, a.1 - b.1)
}
fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn cnorm2(a: C64) -> f64 {
    a.0 * a.0 + a.1 * a.1
}
fn cdiv(a: C64, b: C64) -> C64 {
    let n = cnorm2(b);
    ((a.0 * b.0 + a.1 * b.1) / n, (a.1 * b.0 - a.0 * b.1) / n)
}

/// Horoball with floating tangent; `tangent = None` is the ball at infinity
/// and `size` is then the plane height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatBall {
    pub tangent: Option<C64>,
    pub size: f64,
    pub word_length: u32,
}

/// Result of the floating walk: finite tangents in the region, sorted by
/// (re, im).
#[derive(Clone, Debug, Default)]
pub struct FloatOrbit {
    pub balls: Vec<FloatBall>,
    pub truncated: bool,
}

#[derive(Clone, Copy)]
struct FloatMap {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

impl FloatMap {
    fn det(&self) -> C64 {
        csub(cmul(self.a, self.d), cmul(self.b, self.c))
    }

    fn inverse(&self) -> FloatMap {
        FloatMap {
            a: self.d,
            b: (-self.b.0, -self.b.1),
            c: (-self.c.0, -self.c.1),
            d: self.a,
        }
    }

    fn horoball_image(&self, ball: &FloatBall) -> FloatBall {
        match ball.tangent {
            None => {
                if cnorm2(self.c) == 0.0 {
                    let scale = (cnorm2(self.a) / cnorm2(self.d)).sqrt();
                    FloatBall {
                        tangent: None,
                        size: ball.size * scale,
                        word_length: ball.word_length + 1,
                    }
                } else {
                    FloatBall {
                        tangent: Some(cdiv(self.a, self.c)),
                        size: 1.0 / (cnorm2(self.c) * ball.size),
                        word_length: ball.word_length + 1,
                    }
                }
            }
            Some(p) => {
                let v = cadd(cmul(self.c, p), self.d);
                let nv = cnorm2(v);
                if nv <= 1e-24 {
                    FloatBall {
                        tangent: None,
                        size: 1.0 / (cnorm2(self.c) * ball.size),
                        word_length: ball.word_length + 1,
                    }
                } else {
                    let u = cadd(cmul(self.a, p), self.b);
                    FloatBall {
                        tangent: Some(cdiv(u, v)),
                        size: ball.size / nv,
                        word_length: ball.word_length + 1,
                    }
                }
            }
        }
    }
}

/// Orbit expansion for generic unimodular generator sets given as rows
/// `[a, b, c, d]` of complex entries. Tangents are deduplicated by snapping
/// within `1e-9` of a ball's diameter; the output carries the
/// `approximate` flag via `FloatOrbit` itself. Discreteness of the generated
/// group is the caller's responsibility; bad inputs can produce overlapping
/// horoballs, which are reported as found.
pub fn expand_orbit_float(
    generators: &[[C64; 4]],
    region: &Window,
    min_diameter: f64,
    max_nodes: usize,
) -> Result<FloatOrbit> {
    if !(min_diameter > 0.0) {
        return Err(Error::InvalidQuery("min_diameter must be positive".into()));
    }
    if generators.is_empty() {
        return Err(Error::InvalidQuery("no generators".into()));
    }
    let mut steps = Vec::new();
    for g in generators {
        let m = FloatMap { a: g[0], b: g[1], c: g[2], d: g[3] };
        let det = m.det();
        if (det.0 - 1.0).abs() > 1e-9 || det.1.abs() > 1e-9 {
            return Err(Error::NotUnimodular(format!("{}+{}i", det.0, det.1)));
        }
        steps.push(m);
        steps.push(m.inverse());
    }

    let (x_range, y_range) = float_window_bounds(region);
    let margin = INFLATION_MARGIN as f64;
    let expandable = |ball: &FloatBall| match ball.tangent {
        None => true,
        Some((re, im)) => {
            ball.size >= min_diameter
                && re >= x_range.0 - margin
                && re <= x_range.1 + margin
                && im >= y_range.0 - margin
                && im <= y_range.1 + margin
        }
    };

    // Spatial-hash dedup: cells comfortably above the snap tolerance and
    // below the tangent separation sqrt(t1 t2) >= min_diameter of a disjoint
    // family.
    let cell = (min_diameter / 4.0).max(1e-9);
    let key = |p: C64| ((p.0 / cell).floor() as i64, (p.1 / cell).floor() as i64);
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut accepted: Vec<FloatBall> = Vec::new();
    let mut infinity_seen = true;
    let mut queue: VecDeque<FloatBall> = VecDeque::new();
    let mut truncated = false;

    let is_duplicate = |cells: &HashMap<(i64, i64), Vec<usize>>,
                        accepted: &Vec<FloatBall>,
                        p: C64,
                        size: f64| {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = cells.get(&(kx + dx, ky + dy)) {
                    for &i in bucket {
                        let q = accepted[i].tangent.unwrap();
                        let tol = 1e-9 * size.max(accepted[i].size);
                        if (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol {
                            return true;
                        }
                    }
                }
            }
        }
        false
    };

    queue.push_back(FloatBall { tangent: None, size: 1.0, word_length: 0 });
    'walk: while let Some(ball) = queue.pop_front() {
        for m in &steps {
            let img = m.horoball_image(&ball);
            match img.tangent {
                None => {
                    if !infinity_seen {
                        infinity_seen = true;
                        queue.push_back(img);
                    }
                }
                Some(p) => {
                    if is_duplicate(&cells, &accepted, p, img.size) {
                        continue;
                    }
                    if accepted.len() >= max_nodes {
                        truncated = true;
                        break 'walk;
                    }
                    let idx = accepted.len();
                    accepted.push(img);
                    cells.entry(key(p)).or_default().push(idx);
                    if expandable(&img) {
                        queue.push_back(img);
                    }
                }
            }
        }
    }

    let mut balls: Vec<FloatBall> = accepted
        .into_iter()
        .filter(|b| {
            let Some((re, im)) = b.tangent else { return false };
            b.size >= min_diameter
                && re >= x_range.0
                && re <= x_range.1
                && im >= y_range.0
                && im <= y_range.1
        })
        .collect();
    balls.sort_unstable_by(|a, b| {
        let pa = a.tangent.unwrap();
        let pb = b.tangent.unwrap();
        pa.0.total_cmp(&pb.0).then(pa.1.total_cmp(&pb.1))
    });
    Ok(FloatOrbit { balls, truncated })
}

fn float_window_bounds(window: &Window) -> ((f64, f64), (f64, f64)) {
    use crate::arith::rat_f64;
    match window {
        Window::Interval { lo, hi } => ((rat_f64(lo), rat_f64(hi)), (0.0, 0.0)),
        Window::Box { x, y } => {
            ((rat_f64(&x.0), rat_f64(&x.1)), (rat_f64(&y.0), rat_f64(&y.1)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Gint;
    use num_traits::One;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn grat(n: i64, d: i64) -> Grat {
        Grat::new(Gint::from_int(n), Gint::from_int(d))
    }

    fn modular_request(lo: (i64, i64), hi: (i64, i64), min_diam: (i64, i64)) -> OrbitRequest {
        OrbitRequest::for_preset(
            &GroupPreset::modular(),
            Window::interval(rat(lo.0, lo.1), rat(hi.0, hi.1)),
            rat(min_diam.0, min_diam.1),
        )
    }

    #[test]
    fn modular_unit_window_low_order() {
        let req = modular_request((0, 1), (1, 1), (1, 25));
        let got = expand_orbit(&req).unwrap();
        assert!(!got.truncated);
        assert_eq!(got.count(), 11);
        let ford = ford_reference(
            &GroupPreset::modular(),
            &req.region,
            &req.min_diameter,
        )
        .unwrap();
        assert_eq!(got.shapes(), ford.shapes());
        assert_eq!(got.min_diameter(), Some(&rat(1, 25)));
        assert_eq!(got.max_diameter(), Some(&rat(1, 1)));
    }

    #[test]
    fn threshold_above_one_gives_empty_set() {
        let req = modular_request((0, 1), (1, 1), (2, 1));
        assert_eq!(expand_orbit(&req).unwrap().count(), 0);
        let ford =
            ford_reference(&GroupPreset::modular(), &req.region, &rat(2, 1)).unwrap();
        assert_eq!(ford.count(), 0);
    }

    #[test]
    fn ford_narrow_window() {
        let ford = ford_reference(
            &GroupPreset::modular(),
            &Window::interval(rat(1, 3), rat(1, 2)),
            &rat(1, 25),
        )
        .unwrap();
        let tangents: Vec<&BoundaryPoint> = ford.shapes().iter().map(|s| s.0).collect();
        assert_eq!(
            tangents,
            vec![
                &BoundaryPoint::Finite(grat(1, 3)),
                &BoundaryPoint::Finite(grat(2, 5)),
                &BoundaryPoint::Finite(grat(1, 2)),
            ]
        );
    }

    #[test]
    fn word_lengths_are_minimal_depths() {
        let req = modular_request((0, 1), (1, 1), (1, 25));
        let got = expand_orbit(&req).unwrap();
        let depth = |p: Grat| {
            got.balls
                .iter()
                .find(|b| b.ball.tangent() == &BoundaryPoint::Finite(p.clone()))
                .unwrap()
                .word_length
        };
        assert_eq!(depth(grat(0, 1)), 1);
        assert_eq!(depth(grat(1, 1)), 2);
        assert_eq!(depth(grat(1, 2)), 4);
    }

    #[test]
    fn picard_small_threshold_family() {
        let preset = GroupPreset::picard();
        let region = Window::unit(crate::moebius::PresetName::Picard);

        // 1/N(q) >= 1/3 forces N(q) in {1, 2}: the four corners and the box
        // center.
        let req = OrbitRequest::for_preset(&preset, region.clone(), rat(1, 3));
        let got = expand_orbit(&req).unwrap();
        assert_eq!(got.count(), 5);
        let ford = ford_reference(&preset, &region, &rat(1, 3)).unwrap();
        assert_eq!(got.shapes(), ford.shapes());

        // 1/N(q) >= 1/4 admits N(q) = 4 as well: four more half-integer
        // tangents on the edges.
        let req = OrbitRequest::for_preset(&preset, region.clone(), rat(1, 4));
        let got = expand_orbit(&req).unwrap();
        assert_eq!(got.count(), 9);
        let ford = ford_reference(&preset, &region, &rat(1, 4)).unwrap();
        assert_eq!(got.shapes(), ford.shapes());
    }

    #[test]
    fn matches_ford_on_shifted_windows() {
        let preset = GroupPreset::modular();
        for (lo, hi) in [((-1, 2), (3, 4)), ((2, 1), (3, 1)), ((-7, 3), (-13, 6))] {
            let region = Window::interval(rat(lo.0, lo.1), rat(hi.0, hi.1));
            let req = OrbitRequest::for_preset(&preset, region.clone(), rat(1, 400));
            let got = expand_orbit(&req).unwrap();
            let ford = ford_reference(&preset, &region, &rat(1, 400)).unwrap();
            assert_eq!(got.shapes(), ford.shapes(), "window {lo:?}..{hi:?}");
        }
    }

    #[test]
    fn matches_ford_on_gaussian_box() {
        let preset = GroupPreset::picard();
        let region = Window::rect(rat(-1, 2), rat(1, 1), rat(0, 1), rat(3, 4));
        let req = OrbitRequest::for_preset(&preset, region.clone(), rat(1, 25));
        let got = expand_orbit(&req).unwrap();
        let ford = ford_reference(&preset, &region, &rat(1, 25)).unwrap();
        assert!(!got.truncated);
        assert_eq!(got.shapes(), ford.shapes());
    }

    #[test]
    fn seed_choice_does_not_change_the_family() {
        let preset = GroupPreset::modular();
        let region = Window::unit(crate::moebius::PresetName::Modular);
        let mut req = OrbitRequest::for_preset(&preset, region, rat(1, 25));
        req.seeds = vec![Horoball::finite(grat(0, 1), rat(1, 1))];
        let got = expand_orbit(&req).unwrap();
        assert_eq!(got.count(), 11);
    }

    #[test]
    fn generator_order_does_not_change_output() {
        let preset = GroupPreset::picard();
        let region = Window::unit(crate::moebius::PresetName::Picard);
        let mut req = OrbitRequest::for_preset(&preset, region, rat(1, 16));
        let base = expand_orbit(&req).unwrap();
        req.generators.reverse();
        let flipped = expand_orbit(&req).unwrap();
        assert_eq!(base.balls, flipped.balls);
    }

    #[test]
    fn smaller_threshold_gives_superset() {
        let coarse = expand_orbit(&modular_request((0, 1), (1, 1), (1, 16))).unwrap();
        let fine = expand_orbit(&modular_request((0, 1), (1, 1), (1, 64))).unwrap();
        assert!(coarse.count() < fine.count());
        for b in &coarse.balls {
            assert!(fine.balls.contains(b), "missing {:?}", b.ball);
        }
    }

    #[test]
    fn truncation_flag_on_tiny_budget() {
        let mut req = modular_request((0, 1), (1, 1), (1, 2500));
        req.max_nodes = 10;
        let got = expand_orbit(&req).unwrap();
        assert!(got.truncated);
    }

    #[test]
    fn sampled_pairs_are_disjoint() {
        let got = expand_orbit(&modular_request((0, 1), (1, 1), (1, 900))).unwrap();
        let n = got.count();
        assert!(n > 100);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j {
                assert!(horoballs_disjoint(&got.balls[i].ball, &got.balls[j].ball));
            }
        }
        // Every finite ball clears the base horoball exactly.
        let base = Horoball::base();
        for b in &got.balls {
            assert!(horoballs_disjoint(&b.ball, &base));
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let mut req = modular_request((0, 1), (1, 1), (0, 1));
        assert!(expand_orbit(&req).is_err());
        req.min_diameter = rat(1, 4);
        req.generators.clear();
        assert!(expand_orbit(&req).is_err());
    }

    #[test]
    fn float_walk_matches_exact_walk_on_modular_preset() {
        let gens: Vec<[(f64, f64); 4]> = vec![
            [(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
            [(0.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
        ];
        let region = Window::interval(rat(0, 1), rat(1, 1));
        let float = expand_orbit_float(&gens, &region, 1.0 / 25.0 - 1e-12, 100_000).unwrap();
        let exact = expand_orbit(&modular_request((0, 1), (1, 1), (1, 25))).unwrap();
        assert_eq!(float.balls.len(), exact.count());
        for (fb, eb) in float.balls.iter().zip(&exact.balls) {
            let p = eb.ball.tangent().finite().unwrap().approx();
            let t = crate::arith::rat_f64(eb.ball.size());
            let (fre, fim) = fb.tangent.unwrap();
            assert!((fre - p.0).abs() < 1e-9 && (fim - p.1).abs() < 1e-9);
            assert!((fb.size - t).abs() < 1e-9);
        }
    }

    #[test]
    fn float_walk_rejects_non_unimodular() {
        let gens: Vec<[(f64, f64); 4]> =
            vec![[(2.0, 0.0), (0.0, 0.0), (0.0, 0.0), (2.0, 0.0)]];
        let region = Window::interval(rat(0, 1), rat(1, 1));
        assert!(matches!(
            expand_orbit_float(&gens, &region, 0.1, 1000),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn diameters_scale_as_inverse_denominator_norm() {
        let got = expand_orbit(&modular_request((0, 1), (1, 1), (1, 100))).unwrap();
        for b in &got.balls {
            let BoundaryPoint::Finite(p) = b.ball.tangent() else { unreachable!() };
            let expect = Rat::new(num_bigint::BigInt::one(), p.den_norm());
            assert_eq!(b.ball.size(), &expect);
        }
    }
}
