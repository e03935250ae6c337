//! Unimodular Moebius maps over the Gaussian integers, horoballs, and the two
//! arithmetic group presets.
//!
//! A map `[[a, b], [c, d]]` with `ad - bc = 1` acts on the upper half-plane
//! (real entries) or upper half-space (Gaussian entries) by
//! `z -> (az + b)/(cz + d)`. Maps are stored projectively: of the two
//! representatives `±M` the one whose first nonzero component (in the order
//! `a.re, a.im, b.re, b.im, c.re, c.im, d.re, d.im`) is positive.
//!
//! Horoballs are Euclidean balls tangent to the boundary. The tangent point is
//! either a finite Gaussian rational or the point at infinity; the size field
//! is the Euclidean diameter for finite tangents and the height of the
//! bounding horizontal plane for the tangent at infinity. All image laws are
//! exact in rational arithmetic:
//!
//! - finite tangent `p`, `cp + d != 0`: tangent `(ap+b)/(cp+d)`, diameter
//!   `t / |cp+d|^2`;
//! - finite tangent with `cp + d = 0`: the horoball at infinity of height
//!   `1 / (|c|^2 t)`;
//! - tangent at infinity, `c != 0`: tangent `a/c`, diameter `1 / (|c|^2 h)`;
//! - tangent at infinity, `c = 0`: height preserved (`a, d` are then units).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{Gint, Grat, Rat};
use crate::error::{Error, Result};

/// Point on the boundary at infinity: the Riemann sphere for the Picard case,
/// the circle `R u {inf}` for the modular case.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum BoundaryPoint {
    Infinity,
    Finite(Grat),
}

impl BoundaryPoint {
    pub fn finite(&self) -> Option<&Grat> {
        match self {
            BoundaryPoint::Infinity => None,
            BoundaryPoint::Finite(p) => Some(p),
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Infinity => write!(f, "inf"),
            BoundaryPoint::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Horoball: a Euclidean ball tangent to the boundary at `tangent`, or a
/// half-space above height `size` when tangent is infinity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Horoball {
    tangent: BoundaryPoint,
    size: Rat,
}

impl Horoball {
    /// Ball tangent at a finite point with the given Euclidean diameter.
    pub fn finite(tangent: Grat, diameter: Rat) -> Self {
        assert!(diameter.is_positive(), "diameter must be positive");
        Horoball { tangent: BoundaryPoint::Finite(tangent), size: diameter }
    }

    /// Half-space `{ y > height }` tangent at infinity.
    pub fn at_infinity(height: Rat) -> Self {
        assert!(height.is_positive(), "height must be positive");
        Horoball { tangent: BoundaryPoint::Infinity, size: height }
    }

    /// The base horoball of the arithmetic presets: height one at infinity.
    pub fn base() -> Self {
        Horoball::at_infinity(Rat::one())
    }

    pub fn tangent(&self) -> &BoundaryPoint {
        &self.tangent
    }

    pub fn is_at_infinity(&self) -> bool {
        matches!(self.tangent, BoundaryPoint::Infinity)
    }

    /// Euclidean diameter (finite tangent) or plane height (infinity).
    pub fn size(&self) -> &Rat {
        &self.size
    }

    /// Strict interior test for a point at boundary coordinate `x` and
    /// height `y > 0`. A point is inside the ball tangent at `p` with
    /// diameter `t` iff `|x - p|^2 + y^2 < t y`.
    pub fn contains(&self, x: &Grat, y: &Rat) -> bool {
        match &self.tangent {
            BoundaryPoint::Infinity => y > &self.size,
            BoundaryPoint::Finite(p) => {
                &(x.dist_sq(p) + y * y) < &(&self.size * y)
            }
        }
    }

    /// Exact penetration ratio of the point `(x, y)`: conjugating the ball to
    /// a height-one horoball at infinity sends the point to height equal to
    /// this ratio, so its log is the penetration depth. Greater than one iff
    /// the point is strictly inside.
    ///
    /// Finite tangent `p`, diameter `t`: ratio is `t y / (|x - p|^2 + y^2)`.
    /// Tangent at infinity, height `h`: ratio is `y / h`.
    pub fn penetration_ratio(&self, x: &Grat, y: &Rat) -> Rat {
        assert!(y.is_positive(), "height must be positive");
        match &self.tangent {
            BoundaryPoint::Infinity => y / &self.size,
            BoundaryPoint::Finite(p) => {
                &self.size * y / (x.dist_sq(p) + y * y)
            }
        }
    }
}

impl fmt::Display for Horoball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tangent {
            BoundaryPoint::Infinity => write!(f, "H(inf; height {})", self.size),
            BoundaryPoint::Finite(p) => write!(f, "H({}; diam {})", p, self.size),
        }
    }
}

/// Unimodular Moebius map with Gaussian integer entries, stored projectively.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MoebiusMap {
    a: Gint,
    b: Gint,
    c: Gint,
    d: Gint,
}

impl MoebiusMap {
    /// Validates `ad - bc = 1` and normalizes the projective sign.
    pub fn new(a: Gint, b: Gint, c: Gint, d: Gint) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        if !det.is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(Self::normalized(a, b, c, d))
    }

    /// Convenience constructor from real integer entries.
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        MoebiusMap::new(
            Gint::from_int(a),
            Gint::from_int(b),
            Gint::from_int(c),
            Gint::from_int(d),
        )
    }

    fn normalized(a: Gint, b: Gint, c: Gint, d: Gint) -> Self {
        let mut m = MoebiusMap { a, b, c, d };
        let flip = [&m.a, &m.b, &m.c, &m.d]
            .iter()
            .flat_map(|g| [&g.re, &g.im])
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        if flip {
            m = MoebiusMap { a: -&m.a, b: -&m.b, c: -&m.c, d: -&m.d };
        }
        m
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Gint::one(),
            b: Gint::zero(),
            c: Gint::zero(),
            d: Gint::one(),
        }
    }

    /// Translation `z -> z + b`.
    pub fn translation(b: Gint) -> Self {
        MoebiusMap { a: Gint::one(), b, c: Gint::zero(), d: Gint::one() }
    }

    /// The inversion `z -> -1/z`.
    pub fn inversion() -> Self {
        Self::normalized(Gint::zero(), -Gint::one(), Gint::one(), Gint::zero())
    }

    pub fn a(&self) -> &Gint {
        &self.a
    }
    pub fn b(&self) -> &Gint {
        &self.b
    }
    pub fn c(&self) -> &Gint {
        &self.c
    }
    pub fn d(&self) -> &Gint {
        &self.d
    }

    /// True when all four entries are real (the map preserves the
    /// half-plane over the real line).
    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real() && self.c.is_real() && self.d.is_real()
    }

    pub fn inverse(&self) -> Self {
        Self::normalized(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// Group composition: `(m1 * m2)(z) = m1(m2(z))`.
    pub fn compose(&self, rhs: &MoebiusMap) -> Self {
        let a = &(&self.a * &rhs.a) + &(&self.b * &rhs.c);
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.d);
        let c = &(&self.c * &rhs.a) + &(&self.d * &rhs.c);
        let d = &(&self.c * &rhs.b) + &(&self.d * &rhs.d);
        debug_assert!((&(&a * &d) - &(&b * &c)).is_one());
        Self::normalized(a, b, c, d)
    }

    /// Action on boundary points.
    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(Grat::new(self.a.clone(), self.c.clone()))
                }
            }
            BoundaryPoint::Finite(x) => {
                let num = &(&self.a * x.num()) + &(&self.b * x.den());
                let den = &(&self.c * x.num()) + &(&self.d * x.den());
                if den.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(Grat::new(num, den))
                }
            }
        }
    }

    /// Exact image of a horoball; see the module docs for the four laws.
    pub fn horoball_image(&self, h: &Horoball) -> Horoball {
        match h.tangent() {
            BoundaryPoint::Infinity => {
                if self.c.is_zero() {
                    Horoball::at_infinity(h.size().clone())
                } else {
                    let denom = Rat::from_integer(self.c.norm()) * h.size();
                    Horoball::finite(
                        Grat::new(self.a.clone(), self.c.clone()),
                        denom.recip(),
                    )
                }
            }
            BoundaryPoint::Finite(p) => {
                let v = &(&self.c * p.num()) + &(&self.d * p.den());
                if v.is_zero() {
                    let denom = Rat::from_integer(self.c.norm()) * h.size();
                    Horoball::at_infinity(denom.recip())
                } else {
                    let u = &(&self.a * p.num()) + &(&self.b * p.den());
                    let scale = Rat::new(p.den().norm(), v.norm());
                    Horoball::finite(Grat::new(u, v), h.size() * scale)
                }
            }
        }
    }

    /// Action on interior points `(x, y)` with `y > 0`: boundary coordinate
    /// and height of the image, exactly.
    pub fn apply_interior(&self, x: &Grat, y: &Rat) -> (Grat, Rat) {
        apply_interior_entries(
            &Grat::from_gint(self.a.clone()),
            &Grat::from_gint(self.b.clone()),
            &Grat::from_gint(self.c.clone()),
            &Grat::from_gint(self.d.clone()),
            x,
            y,
        )
    }

    /// Entries as floats, row major, for approximate pipelines.
    pub fn approx_entries(&self) -> [(f64, f64); 4] {
        [
            self.a.approx(),
            self.b.approx(),
            self.c.approx(),
            self.d.approx(),
        ]
    }
}

/// Interior action for a determinant-one map with Gaussian rational entries.
/// With `u = ax + b`, `v = cx + d`, `D = |v|^2 + |c|^2 y^2`, the image is
/// `((u conj(v) + a conj(c) y^2) / D, y / D)`; the height factor uses
/// `ad - bc = 1`.
pub(crate) fn apply_interior_entries(
    a: &Grat,
    b: &Grat,
    c: &Grat,
    d: &Grat,
    x: &Grat,
    y: &Rat,
) -> (Grat, Rat) {
    assert!(y.is_positive(), "interior point needs positive height");
    let u = &(a * x) + b;
    let v = &(c * x) + d;
    let y2 = y * y;
    let den = v.norm_sq() + c.norm_sq() * &y2;
    let num = &(&u * &v.conj()) + &(a * &c.conj()).mul_rat(&y2);
    (num.mul_rat(&den.recip()), y / den)
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// The two arithmetic presets.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum PresetName {
    /// `PSL(2, Z)` acting on the hyperbolic plane.
    Modular,
    /// `PSL(2, Z[i])` acting on hyperbolic 3-space.
    Picard,
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresetName::Modular => write!(f, "modular"),
            PresetName::Picard => write!(f, "picard"),
        }
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modular" => Ok(PresetName::Modular),
            "picard" => Ok(PresetName::Picard),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Arithmetic group preset: generators and geometric constants.
#[derive(Clone, Debug)]
pub struct GroupPreset {
    name: PresetName,
    generators: Vec<MoebiusMap>,
}

impl GroupPreset {
    pub fn new(name: PresetName) -> Self {
        let generators = match name {
            PresetName::Modular => vec![
                MoebiusMap::translation(Gint::one()),
                MoebiusMap::inversion(),
            ],
            PresetName::Picard => vec![
                MoebiusMap::translation(Gint::one()),
                MoebiusMap::translation(Gint::i()),
                MoebiusMap::inversion(),
            ],
        };
        GroupPreset { name, generators }
    }

    pub fn modular() -> Self {
        Self::new(PresetName::Modular)
    }

    pub fn picard() -> Self {
        Self::new(PresetName::Picard)
    }

    pub fn name(&self) -> PresetName {
        self.name
    }

    pub fn generators(&self) -> &[MoebiusMap] {
        &self.generators
    }

    /// Dimension of the boundary: 1 for the modular group, 2 for Picard.
    pub fn boundary_dim(&self) -> u32 {
        match self.name {
            PresetName::Modular => 1,
            PresetName::Picard => 2,
        }
    }

    /// Critical exponent; equals the boundary dimension for these lattices.
    pub fn delta(&self) -> f64 {
        self.boundary_dim() as f64
    }

    pub fn delta_rat(&self) -> Rat {
        Rat::from_integer(BigInt::from(self.boundary_dim()))
    }

    /// True when tangent points and denominators range over the Gaussian
    /// integers rather than the rational integers.
    pub fn gaussian(&self) -> bool {
        self.name == PresetName::Picard
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn grat(n: i64, d: i64) -> Grat {
        Grat::new(Gint::from_int(n), Gint::from_int(d))
    }

    fn ball(n: i64, d: i64, tn: i64, td: i64) -> Horoball {
        Horoball::finite(grat(n, d), rat(tn, td))
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(
            MoebiusMap::from_ints(1, 1, 1, 1),
            Err(Error::NotUnimodular(_))
        ));
        assert!(matches!(
            MoebiusMap::from_ints(2, 0, 0, 2),
            Err(Error::NotUnimodular(_))
        ));
        assert!(MoebiusMap::from_ints(2, 1, 1, 1).is_ok());
    }

    #[test]
    fn projective_sign_is_normalized() {
        let m = MoebiusMap::from_ints(-1, 0, 0, -1).unwrap();
        assert_eq!(m, MoebiusMap::identity());
        let s = MoebiusMap::inversion();
        assert_eq!(s.a(), &Gint::zero());
        assert_eq!(s.b(), &Gint::one());
        assert_eq!(s.c(), &-Gint::one());
        assert_eq!(s.d(), &Gint::zero());
    }

    #[test]
    fn base_horoball_image_under_lower_triangular() {
        // [[1, 0], [2, 1]] sends the height-one horoball at infinity to the
        // ball at 1/2 of diameter 1/4.
        let g = MoebiusMap::from_ints(1, 0, 2, 1).unwrap();
        let img = g.horoball_image(&Horoball::base());
        assert_eq!(img, ball(1, 2, 1, 4));
    }

    #[test]
    fn finite_horoball_image() {
        // [[1, 1], [1, 2]] sends the ball at 0 of diameter 1 to the ball at
        // 1/2 of diameter 1/4.
        let g = MoebiusMap::from_ints(1, 1, 1, 2).unwrap();
        let img = g.horoball_image(&ball(0, 1, 1, 1));
        assert_eq!(img, ball(1, 2, 1, 4));
    }

    #[test]
    fn inversion_swaps_base_and_unit_ball() {
        let s = MoebiusMap::inversion();
        let unit = ball(0, 1, 1, 1);
        assert_eq!(s.horoball_image(&Horoball::base()), unit);
        assert_eq!(s.horoball_image(&unit), Horoball::base());
    }

    #[test]
    fn translation_preserves_diameter() {
        let t = MoebiusMap::translation(Gint::one());
        let img = t.horoball_image(&ball(1, 3, 1, 9));
        assert_eq!(img, ball(4, 3, 1, 9));
    }

    #[test]
    fn gaussian_translation() {
        let u = MoebiusMap::translation(Gint::i());
        let img = u.horoball_image(&ball(0, 1, 1, 1));
        assert_eq!(
            img,
            Horoball::finite(Grat::new(Gint::i(), Gint::one()), rat(1, 1))
        );
    }

    #[test]
    fn boundary_action() {
        let g = MoebiusMap::from_ints(1, 0, 2, 1).unwrap();
        assert_eq!(
            g.apply_boundary(&BoundaryPoint::Infinity),
            BoundaryPoint::Finite(grat(1, 2))
        );
        assert_eq!(
            g.apply_boundary(&BoundaryPoint::Finite(grat(-1, 2))),
            BoundaryPoint::Infinity
        );
        assert_eq!(
            g.apply_boundary(&BoundaryPoint::Finite(grat(1, 1))),
            BoundaryPoint::Finite(grat(1, 3))
        );
    }

    #[test]
    fn interior_action_inversion() {
        // -1/(i/2) = 2i: the point (0, 1/2) maps to (0, 2).
        let s = MoebiusMap::inversion();
        let (x, y) = s.apply_interior(&Grat::zero(), &rat(1, 2));
        assert!(x.is_zero());
        assert_eq!(y, rat(2, 1));
    }

    #[test]
    fn interior_action_matches_hand_computation() {
        // [[2, 1], [1, 1]] at x + iy = 1 + i: u = 3, v = 2, D = 5;
        // image = ((3)(2) + 2)/5 + i/5 = 8/5 + i/5.
        let g = MoebiusMap::from_ints(2, 1, 1, 1).unwrap();
        let (x, y) = g.apply_interior(&grat(1, 1), &rat(1, 1));
        assert_eq!(x, grat(8, 5));
        assert_eq!(y, rat(1, 5));
    }

    #[test]
    fn contains_penetration_example() {
        // (1/4, 1/2) lies in the unit-diameter ball at 0:
        // |x|^2 + y^2 = 5/16 < t y = 1/2.
        let b = ball(0, 1, 1, 1);
        assert!(b.contains(&grat(1, 4), &rat(1, 2)));
        assert!(!b.contains(&grat(1, 1), &rat(1, 2)));
        assert!(Horoball::base().contains(&Grat::zero(), &rat(3, 2)));
        assert!(!Horoball::base().contains(&Grat::zero(), &rat(1, 2)));
    }

    #[test]
    fn preset_constants() {
        let m = GroupPreset::modular();
        assert_eq!(m.boundary_dim(), 1);
        assert_eq!(m.generators().len(), 2);
        assert!(!m.gaussian());
        let p = GroupPreset::picard();
        assert_eq!(p.boundary_dim(), 2);
        assert_eq!(p.generators().len(), 3);
        assert!(p.gaussian());
        assert_eq!("modular".parse::<PresetName>().unwrap(), PresetName::Modular);
        assert!("euclid".parse::<PresetName>().is_err());
    }

    fn arb_word() -> impl Strategy<Value = MoebiusMap> {
        prop::collection::vec((0usize..3, prop::bool::ANY), 0..12).prop_map(|letters| {
            let gens = GroupPreset::picard().generators().to_vec();
            let mut m = MoebiusMap::identity();
            for (idx, inv) in letters {
                let g = if inv { gens[idx].inverse() } else { gens[idx].clone() };
                m = m.compose(&g);
            }
            m
        })
    }

    proptest! {
        #[test]
        fn compose_inverse_is_identity(m in arb_word()) {
            prop_assert_eq!(m.compose(&m.inverse()), MoebiusMap::identity());
        }

        #[test]
        fn horoball_image_roundtrip(m in arb_word(), n in -4i64..5, d in 1i64..5, tn in 1i64..4) {
            let h = Horoball::finite(grat(n, d), rat(tn, 7));
            let img = m.horoball_image(&h);
            prop_assert_eq!(m.inverse().horoball_image(&img), h);
        }

        #[test]
        fn image_tangent_matches_boundary_action(m in arb_word(), n in -4i64..5, d in 1i64..5) {
            let h = Horoball::finite(grat(n, d), rat(1, 3));
            let img = m.horoball_image(&h);
            let p = m.apply_boundary(&BoundaryPoint::Finite(grat(n, d)));
            prop_assert_eq!(img.tangent(), &p);
        }

        #[test]
        fn interior_point_tracks_containment(m in arb_word(), xn in -3i64..4, yd in 1i64..6) {
            // Membership in a horoball is preserved by the action.
            let h = Horoball::finite(grat(xn, 7), rat(1, 2));
            let probe = (grat(xn, 7), rat(1, yd * 4));
            let inside = h.contains(&probe.0, &probe.1);
            let img = m.horoball_image(&h);
            let (ix, iy) = m.apply_interior(&probe.0, &probe.1);
            prop_assert_eq!(img.contains(&ix, &iy), inside);
        }
    }
}
