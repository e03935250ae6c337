//! Empirical box-dimension and Assouad-spectrum estimators for the measure
//! models, together with the closed-form targets they are compared against.
//!
//! Ball masses for the atomic models come from certified lower bounds with
//! the truncation denominator growing like `1/r`, so the truncated fraction
//! of the mass is scale-uniform and log-log slopes stay unbiased.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{rat_f64, rat_pow, Grat, Rat};
use crate::centers;
use crate::error::{Error, Result};
use crate::measures::{mu_delta_ball, mu_s_ball};
use crate::moebius::{GroupPreset, PresetName};
use crate::util::{lsq_slope, min_pair_slope};

/// A measure to estimate: the conformal density at the critical exponent
/// (Lebesgue for both presets) or an atomic `s`-conformal measure.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureModel {
    PattersonSullivan { preset: PresetName },
    Conformal { preset: PresetName, s: f64 },
}

impl MeasureModel {
    pub fn preset(&self) -> PresetName {
        match self {
            MeasureModel::PattersonSullivan { preset } => *preset,
            MeasureModel::Conformal { preset, .. } => *preset,
        }
    }

    fn group(&self) -> GroupPreset {
        GroupPreset::new(self.preset())
    }

    /// Ball mass at scale `r`: exact for the critical density, a certified
    /// lower bound with cutoff `q_cut_for(r)` for the atomic models.
    pub fn ball_mass(&self, z: &Grat, r: &Rat) -> Result<f64> {
        let group = self.group();
        match self {
            MeasureModel::PattersonSullivan { .. } => mu_delta_ball(&group, z, r),
            MeasureModel::Conformal { s, .. } => {
                let q_cut = q_cut_for(self.preset(), r)?;
                Ok(mu_s_ball(&group, z, r, *s, q_cut)?.lower)
            }
        }
    }
}

/// Truncation denominator for ball masses at scale `r`. Proportional to
/// `1/r` so that the truncated tail stays a fixed fraction of the mass
/// across scales; the constant is smaller on the plane where the cutoff
/// enters through its square.
fn q_cut_for(preset: PresetName, r: &Rat) -> Result<u64> {
    let factor = match preset {
        PresetName::Modular => 32u64,
        PresetName::Picard => 8u64,
    };
    if !r.is_positive() {
        return Err(Error::InvalidQuery("scale must be positive".into()));
    }
    (r.recip().ceil().to_integer() * BigInt::from(factor))
        .to_u64()
        .ok_or_else(|| {
            Error::TailCertification(format!(
                "cutoff for scale {r} exceeds the supported denominator range"
            ))
        })
}

/// Log-log regression over a strictly decreasing ladder of scales.
#[derive(Debug, Clone)]
pub struct ScaleRegression {
    /// `(r, value)` pairs, scales strictly decreasing, values positive.
    pub points: Vec<(f64, f64)>,
    /// Least-squares slope of `ln value` against `ln r`.
    pub slope: f64,
    /// Largest absolute log-space residual of the fit.
    pub residual: f64,
    /// Ratio exponent when the regression came from a spectrum run.
    pub theta: Option<f64>,
}

impl ScaleRegression {
    pub fn fit(points: Vec<(f64, f64)>, theta: Option<f64>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::RegressionPoints { need: 4, got: points.len() });
        }
        for w in points.windows(2) {
            if w[1].0 >= w[0].0 {
                return Err(Error::InvalidQuery(
                    "regression scales must be strictly decreasing".into(),
                ));
            }
        }
        if points.iter().any(|&(r, v)| r <= 0.0 || v <= 0.0 || !v.is_finite()) {
            return Err(Error::InvalidQuery(
                "regression needs positive scales and values".into(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|&(r, _)| r.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
        let slope = lsq_slope(&xs, &ys);
        if !slope.is_finite() {
            return Err(Error::InvalidQuery("regression slope is not finite".into()));
        }
        let n = xs.len() as f64;
        let intercept = ys.iter().sum::<f64>() / n - slope * xs.iter().sum::<f64>() / n;
        let residual = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (slope * x + intercept)).abs())
            .fold(0.0, f64::max);
        Ok(ScaleRegression { points, slope, residual, theta })
    }
}

/// Ball-mass curve of one center, for plot artifacts.
#[derive(Debug, Clone)]
pub struct CenterCurve {
    pub center: Grat,
    /// `(r, mass)` pairs in the order of the scale ladder.
    pub points: Vec<(f64, f64)>,
}

/// Box-dimension estimate from the minimum-mass curve over a center grid.
#[derive(Debug, Clone)]
pub struct BoxDimEstimate {
    /// Best-subsequence (minimum pairwise) slope; finite-sample analogue of
    /// the lower box dimension.
    pub lower: f64,
    /// Least-squares slope; finite-sample analogue of the upper box
    /// dimension.
    pub upper: f64,
    /// The minimum-mass curve the slopes were fitted on.
    pub regression: ScaleRegression,
    pub curves: Vec<CenterCurve>,
    pub target: f64,
}

/// Closed-form box dimension of the model.
pub fn box_dim_target(model: &MeasureModel) -> f64 {
    let group = GroupPreset::new(model.preset());
    let delta = group.delta();
    let k_min = group.boundary_dim() as f64;
    match model {
        MeasureModel::PattersonSullivan { .. } => delta.max(2.0 * delta - k_min),
        MeasureModel::Conformal { s, .. } => (2.0 * s - delta).max(2.0 * s - k_min),
    }
}

/// Closed-form Assouad spectrum of the model at `theta`.
pub fn spectrum_target(model: &MeasureModel, theta: f64) -> f64 {
    match model {
        MeasureModel::PattersonSullivan { .. } => box_dim_target(model),
        MeasureModel::Conformal { .. } => box_dim_target(model) / (1.0 - theta),
    }
}

/// Dimensions that are exact constants for the models and are reported
/// rather than estimated: the atomic models are exact dimensional with
/// dimension zero and non-doubling, the critical densities are Lebesgue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DocumentedDimensions {
    pub hausdorff: f64,
    pub assouad: f64,
    pub quasi_assouad: f64,
    pub lower: f64,
}

pub fn documented_dimensions(model: &MeasureModel) -> DocumentedDimensions {
    let delta = GroupPreset::new(model.preset()).delta();
    match model {
        MeasureModel::PattersonSullivan { .. } => DocumentedDimensions {
            hausdorff: delta,
            assouad: delta,
            quasi_assouad: delta,
            lower: delta,
        },
        MeasureModel::Conformal { .. } => DocumentedDimensions {
            hausdorff: 0.0,
            assouad: f64::INFINITY,
            quasi_assouad: f64::INFINITY,
            lower: 0.0,
        },
    }
}

fn validate_scale_ladder(r_list: &[Rat], min_len: usize) -> Result<()> {
    if r_list.len() < min_len {
        return Err(Error::RegressionPoints { need: min_len, got: r_list.len() });
    }
    if r_list.iter().any(|r| !r.is_positive()) {
        return Err(Error::InvalidQuery("scales must be positive".into()));
    }
    for w in r_list.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidQuery(
                "scales must be strictly decreasing".into(),
            ));
        }
    }
    let ratio = &r_list[1] / &r_list[0];
    for w in r_list.windows(2) {
        if &w[1] / &w[0] != ratio {
            return Err(Error::InvalidQuery("scale ladder must be geometric".into()));
        }
    }
    Ok(())
}

/// Box-dimension estimate over a geometric ladder of at least six scales.
///
/// At each scale the binding quantity is the minimum ball mass over the
/// grid; the least-squares slope of that curve estimates the upper box
/// dimension and the minimum pairwise slope the lower one. The minimum
/// pairwise slope never exceeds the least-squares slope, so the pair always
/// sandwiches.
pub fn box_dim_estimate(
    model: &MeasureModel,
    r_list: &[Rat],
    center_grid: &[Grat],
) -> Result<BoxDimEstimate> {
    validate_scale_ladder(r_list, 6)?;
    if center_grid.is_empty() {
        return Err(Error::InvalidQuery("center grid is empty".into()));
    }
    let mut curves: Vec<CenterCurve> = center_grid
        .iter()
        .map(|z| CenterCurve { center: z.clone(), points: Vec::new() })
        .collect();
    let mut min_points = Vec::with_capacity(r_list.len());
    for r in r_list {
        let mut min_mass = f64::INFINITY;
        for (z, curve) in center_grid.iter().zip(&mut curves) {
            let mass = model.ball_mass(z, r)?;
            curve.points.push((rat_f64(r), mass));
            if mass < min_mass {
                min_mass = mass;
            }
        }
        min_points.push((rat_f64(r), min_mass));
    }
    let regression = ScaleRegression::fit(min_points, None)?;
    let xs: Vec<f64> = regression.points.iter().map(|&(r, _)| r.ln()).collect();
    let ys: Vec<f64> = regression.points.iter().map(|&(_, v)| v.ln()).collect();
    let lower = min_pair_slope(&xs, &ys);
    Ok(BoxDimEstimate {
        lower,
        upper: regression.slope,
        regression,
        curves,
        target: box_dim_target(model),
    })
}

/// One evaluated concentric-ball ratio in a spectrum run.
#[derive(Debug, Clone)]
pub struct SpectrumRow {
    pub center: Grat,
    pub r: f64,
    pub r_theta: f64,
    /// `mass(B(x, r^theta)) / mass(B(x, r))`.
    pub ratio: f64,
    /// `ln ratio / ln(r^{theta - 1})`.
    pub exponent: f64,
}

/// Assouad-spectrum estimate: the extremal concentric-ball exponent.
#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    pub theta: f64,
    /// Maximum exponent over the grid and scale ladder.
    pub estimate: f64,
    /// The row attaining the maximum.
    pub witness: SpectrumRow,
    pub rows: Vec<SpectrumRow>,
    pub target: f64,
}

/// Assouad-spectrum estimate at exponent `theta` over the grid.
///
/// For each center and each scale `r` with an exactly representable
/// `R = r^theta <= 1/2`, evaluates the concentric-ball mass ratio and its
/// exponent `ln(mass_R / mass_r) / ln(r^{theta-1})`; the estimate is the
/// maximum over all rows. Scales whose `r^theta` is irrational are skipped,
/// so dyadic ladders should be chosen with `theta`-compatible depths.
pub fn assouad_spectrum_estimate(
    model: &MeasureModel,
    theta: &Rat,
    r_list: &[Rat],
    center_grid: &[Grat],
) -> Result<SpectrumEstimate> {
    if !theta.is_positive() || *theta >= Rat::one() {
        return Err(Error::InvalidQuery("theta must lie in (0, 1)".into()));
    }
    if center_grid.is_empty() {
        return Err(Error::InvalidQuery("center grid is empty".into()));
    }
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let theta_f = rat_f64(theta);
    let mut rows = Vec::new();
    for r in r_list {
        if !r.is_positive() || *r >= Rat::one() {
            return Err(Error::InvalidQuery("scales must lie in (0, 1)".into()));
        }
        let big = match rat_pow(r, theta) {
            Some(big) if big <= half => big,
            _ => continue,
        };
        for z in center_grid {
            let mass_r = model.ball_mass(z, r)?;
            let mass_big = model.ball_mass(z, &big)?;
            if mass_r <= 0.0 || mass_big <= 0.0 {
                continue;
            }
            let ratio = mass_big / mass_r;
            let exponent = ratio.ln() / ((theta_f - 1.0) * rat_f64(r).ln());
            rows.push(SpectrumRow {
                center: z.clone(),
                r: rat_f64(r),
                r_theta: rat_f64(&big),
                ratio,
                exponent,
            });
        }
    }
    let witness = rows
        .iter()
        .max_by(|a, b| a.exponent.total_cmp(&b.exponent))
        .cloned()
        .ok_or_else(|| {
            Error::InvalidQuery(
                "no scale in the ladder has an exactly representable r^theta".into(),
            )
        })?;
    Ok(SpectrumEstimate {
        theta: theta_f,
        estimate: witness.exponent,
        witness,
        rows,
        target: spectrum_target(model, theta_f),
    })
}

/// The largest `n` with `|f^n(z0)| > r` for the parabolic orbit
/// `f^n(z0) = z0 / (n z0 + 1)`, located by a float estimate and refined
/// exactly. Returns the orbit point; `None` when already `|f(z0)| <= r`.
fn matched_witness(z0: &Grat, r: &Rat) -> Option<Grat> {
    let origin = Grat::from_int(0);
    let r2 = r * r;
    let inside = |n: u64| centers::cusp_approach(z0, n).dist_sq(&origin) <= r2;
    let (x, y) = z0.approx();
    let mag = (x * x + y * y).sqrt();
    let rf = rat_f64(r);
    if mag <= rf || rf <= 0.0 {
        return None;
    }
    // |f^n(z0)| decreases like mag / (n mag + 1), so n ~ 1/r - 1/mag.
    let guess = (1.0 / rf - 1.0 / mag).floor().max(1.0) as u64;
    let mut n = guess.max(1);
    while n > 1 && inside(n) {
        n -= 1;
    }
    while !inside(n + 1) {
        n += 1;
    }
    if inside(n) {
        None
    } else {
        Some(centers::cusp_approach(z0, n))
    }
}

/// The standard estimation grid: the cusp at the origin, the reference
/// centers, and one near-parabolic orbit point per scale, chosen as the
/// deepest orbit point still outside the ball of that radius.
pub fn standard_center_grid(preset: PresetName, r_list: &[Rat]) -> Vec<Grat> {
    let (mut grid, witness_base) = match preset {
        PresetName::Modular => (centers::modular_centers(), centers::golden().clone()),
        PresetName::Picard => {
            let shallow = centers::picard_calibration_centers();
            (shallow.clone(), shallow[0].clone())
        }
    };
    grid.insert(0, Grat::from_int(0));
    for r in r_list {
        if let Some(z) = matched_witness(&witness_base, r) {
            if !grid.contains(&z) {
                grid.push(z);
            }
        }
    }
    grid
}
