//! Horoball enumeration and counting experiments for Kleinian groups acting on
//! hyperbolic 2- and 3-space, in exact arithmetic.
//!
//! The crate covers two arithmetic presets: the modular group `PSL(2, Z)` acting
//! on the upper half-plane and the Picard group `PSL(2, Z[i])` acting on upper
//! half-space. For both, the standard horoball set is the orbit of the horoball
//! at infinity: the horoball tangent at a reduced fraction `p/q` has Euclidean
//! diameter `1/|q|^2`. Everything that can be exact is exact: tangent points and
//! diameters are arbitrary-precision rationals (Gaussian rationals for the
//! Picard group), window tests and counts are integer arithmetic, and floating
//! point enters only for measure values, weights `|H_p|^s`, and regression fits.
//!
//! Module map:
//! - [`arith`]: Gaussian integers and Gaussian rationals in canonical form.
//! - [`moebius`]: unimodular Moebius maps, horoballs, group presets, and the
//!   exact image laws for boundary points, interior points, and horoballs.
//! - [`farey`]: window enumeration and exact counting of reduced fractions by
//!   denominator norm, plus the exhaustive sieves used as oracles.
//! - [`orbit`]: breadth-first horoball orbit expansion with diameter pruning,
//!   cross-checked against the closed-form reference set.
//! - [`measures`]: the Patterson-Sullivan measure on the boundary, atomic
//!   `s`-conformal measure models with certified tail bounds, geodesic
//!   penetration depth, and the global measure formulas.
//! - [`centers`]: exact rational stand-ins for the standard irrational test
//!   points, as continued-fraction convergents.
//! - [`counting`]: scale-window counting queries, comparability bands,
//!   calibration, and the local / intermediate / proximity / continuity
//!   experiments.
//! - [`dimension`]: box-dimension and Assouad-spectrum estimators driven by the
//!   measure models.
//! - [`report`]: deterministic CSV/JSON artifact emission.
//! - [`acceptance`]: the end-to-end verification suite used by tests and the
//!   CLI `verify` command.

pub mod acceptance;
pub mod arith;
pub mod centers;
pub mod counting;
pub mod dimension;
pub mod farey;
pub mod measures;
pub mod moebius;
pub mod orbit;
pub mod report;
mod util;

mod error;

pub use error::{Error, Result};

pub use arith::{Gint, Grat, Rat};
pub use moebius::{BoundaryPoint, GroupPreset, Horoball, MoebiusMap, PresetName};
