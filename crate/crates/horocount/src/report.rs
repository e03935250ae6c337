//! Deterministic artifact rendering: CSV tables, JSON summaries, and
//! plot-data files for the experiment results.
//!
//! Identical inputs produce byte-identical output regardless of thread
//! count: rows are sorted by exact rational keys, CSV floats use a fixed
//! 12-significant-digit scientific form, JSON maps serialize with sorted
//! keys, and every line ends with a bare LF. Fractions render as `num/den`
//! strings and parse back exactly; decimal inputs snap to the exact binary
//! value of the nearest double.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{rat_from_f64, Grat, Rat};
use crate::counting::{
    ComparabilityBand, ContinuityTable, CountRecord, GlobalCountFit, LocalExperiment,
    ProximitySweep,
};
use crate::dimension::{BoxDimEstimate, CenterCurve, MeasureModel, SpectrumEstimate};
use crate::error::{Error, Result};
use crate::measures::{FormulaTerms, MassInterval};
use crate::moebius::{BoundaryPoint, PresetName};
use crate::orbit::HoroballSet;

/// Fixed 12-significant-digit rendering; the CSV and plot-data float form.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.11e}")
}

pub fn rat_str(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// `re_num/re_den` for real points, `a/b+c/d*i` (or `-c/d*i`) otherwise.
pub fn grat_str(z: &Grat) -> String {
    let re = z.re();
    let im = z.im();
    if im.is_zero() {
        rat_str(&re)
    } else if im.is_negative() {
        format!("{}-{}*i", rat_str(&re), rat_str(&-im))
    } else {
        format!("{}+{}*i", rat_str(&re), rat_str(&im))
    }
}

/// Parses `num/den`, integer, or decimal forms. Decimals snap to the exact
/// binary value of the parsed double.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidQuery("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidQuery(format!("bad numerator in `{s}`")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::InvalidQuery(format!("bad denominator in `{s}`")))?;
        if den.is_zero() {
            return Err(Error::InvalidQuery(format!("zero denominator in `{s}`")));
        }
        return Ok(Rat::new(num, den));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Rat::from_integer(n));
    }
    let f: f64 = s
        .parse()
        .map_err(|_| Error::InvalidQuery(format!("cannot parse `{s}` as a rational")))?;
    if !f.is_finite() {
        return Err(Error::InvalidQuery(format!("`{s}` is not finite")));
    }
    Ok(rat_from_f64(f))
}

/// Parses the output of `grat_str`: a rational, optionally followed by
/// `+c/d*i` or `-c/d*i`.
pub fn parse_grat(s: &str) -> Result<Grat> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix("*i") {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| Error::InvalidQuery(format!("missing real part in `{s}`")))?;
        let re = parse_rat(&body[..split])?;
        let im_abs = parse_rat(&body[split + 1..])?;
        let im = if body.as_bytes()[split] == b'-' { -im_abs } else { im_abs };
        Ok(Grat::from_parts(&re, &im))
    } else {
        Ok(Grat::from_parts(&parse_rat(s)?, &Rat::zero()))
    }
}

fn record_order(a: &CountRecord, b: &CountRecord) -> Ordering {
    (a.query.z.re(), a.query.z.im())
        .cmp(&(b.query.z.re(), b.query.z.im()))
        .then_with(|| b.query.r.cmp(&a.query.r))
        .then_with(|| a.query.tau.cmp(&b.query.tau))
        .then_with(|| a.query.k.cmp(&b.query.k))
}

/// The per-experiment counting table. Rows sort by center, then radius
/// descending, then scale base and band index.
pub fn count_csv(records: &[CountRecord]) -> String {
    let mut sorted: Vec<&CountRecord> = records.iter().collect();
    sorted.sort_by(|a, b| record_order(a, b));
    let mut out = String::from("z,R,tau,k,count,prediction,ratio,regime\n");
    for rec in sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            grat_str(&rec.query.z),
            rat_str(&rec.query.r),
            rat_str(&rec.query.tau),
            rec.query.k,
            rec.count,
            format_f64(rec.prediction),
            format_f64(rec.ratio()),
            rec.regime,
        );
    }
    out
}

/// Horoball family as CSV; tangents are split into `re`/`im` fraction pairs
/// on the plane.
pub fn orbit_csv(set: &HoroballSet, gaussian: bool) -> String {
    let mut out = String::new();
    if gaussian {
        out.push_str(
            "tangent_re_num,tangent_re_den,tangent_im_num,tangent_im_den,\
             diameter_num,diameter_den,word_length\n",
        );
    } else {
        out.push_str("tangent_num,tangent_den,diameter_num,diameter_den,word_length\n");
    }
    for ob in &set.balls {
        let p = match ob.ball.tangent() {
            BoundaryPoint::Finite(p) => p,
            BoundaryPoint::Infinity => continue,
        };
        let t = ob.ball.size();
        if gaussian {
            let re = p.re();
            let im = p.im();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                re.numer(),
                re.denom(),
                im.numer(),
                im.denom(),
                t.numer(),
                t.denom(),
                ob.word_length,
            );
        } else {
            let re = p.re();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                re.numer(),
                re.denom(),
                t.numer(),
                t.denom(),
                ob.word_length,
            );
        }
    }
    out
}

/// Exponent-continuity table: one row per exponent, ratios blank when the
/// ball holds no dominant atom.
pub fn continuity_csv(table: &ContinuityTable) -> String {
    let mut out = String::from("s,raw_ratio,atom_removed_ratio\n");
    for row in &table.rows {
        let removed = row
            .atom_removed_ratio
            .map(format_f64)
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{}",
            format_f64(row.s),
            format_f64(row.raw_ratio),
            removed,
        );
    }
    out
}

/// One `(ln r, ln value)` plot-data file per center.
pub fn plotdata(curves: &[CenterCurve]) -> Vec<(String, String)> {
    curves
        .iter()
        .map(|curve| {
            let name: String = grat_str(&curve.center)
                .chars()
                .map(|c| match c {
                    '/' => '_',
                    '+' => 'p',
                    '-' => 'm',
                    '*' => 'x',
                    other => other,
                })
                .collect();
            let mut body = String::from("# ln_r ln_value\n");
            for &(r, v) in &curve.points {
                let _ = writeln!(body, "{} {}", format_f64(r.ln()), format_f64(v.ln()));
            }
            (format!("center_{name}.dat"), body)
        })
        .collect()
}

pub fn band_json(band: &ComparabilityBand) -> Value {
    json!({
        "c_lo": band.c_lo,
        "c_hi": band.c_hi,
        "spread": band.spread(),
        "n_records": band.n_records,
    })
}

pub fn global_summary(fit: &GlobalCountFit) -> Value {
    let first = fit.records.first().expect("fits carry at least four records");
    let ks: Vec<u32> = fit.records.iter().map(|r| r.query.k).collect();
    json!({
        "experiment": "count-global",
        "preset": first.query.preset.to_string(),
        "tau": rat_str(&first.query.tau),
        "k_min": ks.iter().min(),
        "k_max": ks.iter().max(),
        "slope": fit.slope,
        "band": band_json(&fit.band),
    })
}

pub fn local_summary(exp: &LocalExperiment) -> Value {
    let first = exp.records.first().expect("band fits require records");
    json!({
        "experiment": "count-local",
        "preset": first.query.preset.to_string(),
        "tau": rat_str(&first.query.tau),
        "n_records": exp.records.len(),
        "skipped": exp.skipped,
        "band": band_json(&exp.band),
        "c_upper": exp.c_upper,
    })
}

pub fn intermediate_summary(records: &[CountRecord], band: &ComparabilityBand) -> Value {
    let preset = records
        .first()
        .map(|r| r.query.preset.to_string())
        .unwrap_or_default();
    json!({
        "experiment": "intermediate",
        "preset": preset,
        "n_records": records.len(),
        "band": band_json(band),
    })
}

pub fn proximity_summary(sweep: &ProximitySweep) -> Value {
    json!({
        "experiment": "proximity",
        "preset": sweep.preset.to_string(),
        "queries": sweep.queries,
        "violations": sweep.violations,
        "max_count": sweep.max_count,
        "attempts": sweep.attempts,
    })
}

pub fn continuity_summary(table: &ContinuityTable, preset: PresetName, z: &Grat) -> Value {
    json!({
        "experiment": "continuity",
        "preset": preset.to_string(),
        "z": grat_str(z),
        "rows": table.rows.len(),
        "dominant_atom": table.dominant_atom.as_ref().map(grat_str),
    })
}

pub fn mass_summary(
    preset: PresetName,
    z: &Grat,
    r: &Rat,
    s: f64,
    q_cut: u64,
    interval: &MassInterval,
) -> Value {
    json!({
        "experiment": "measure-ball",
        "preset": preset.to_string(),
        "z": grat_str(z),
        "R": rat_str(r),
        "s": s,
        "q_cut": q_cut,
        "lower": interval.lower,
        "upper": interval.upper,
        "width": interval.width(),
    })
}

pub fn formula_summary(
    preset: PresetName,
    z: &Grat,
    r: &Rat,
    s: f64,
    terms: &FormulaTerms,
) -> Value {
    json!({
        "experiment": "global-formula",
        "preset": preset.to_string(),
        "z": grat_str(z),
        "R": rat_str(r),
        "s": s,
        "term1": terms.term1,
        "term2": terms.term2,
        "term3": terms.term3,
        "total": terms.total(),
        "dominant_cusp": terms.dominant_cusp.as_ref().and_then(|h| match h.tangent() {
            BoundaryPoint::Finite(p) => Some(grat_str(p)),
            BoundaryPoint::Infinity => None,
        }),
    })
}

fn model_json(model: &MeasureModel) -> Value {
    match model {
        MeasureModel::PattersonSullivan { preset } => json!({
            "preset": preset.to_string(),
            "measure": "critical",
        }),
        MeasureModel::Conformal { preset, s } => json!({
            "preset": preset.to_string(),
            "measure": "atomic",
            "s": s,
        }),
    }
}

pub fn box_dim_summary(model: &MeasureModel, est: &BoxDimEstimate) -> Value {
    json!({
        "experiment": "dimension",
        "model": model_json(model),
        "lower": est.lower,
        "upper": est.upper,
        "target": est.target,
        "residual": est.regression.residual,
        "scales": est.regression.points.len(),
    })
}

pub fn spectrum_summary(model: &MeasureModel, est: &SpectrumEstimate) -> Value {
    json!({
        "experiment": "dimension",
        "model": model_json(model),
        "theta": est.theta,
        "estimate": est.estimate,
        "target": est.target,
        "witness": {
            "center": grat_str(&est.witness.center),
            "r": est.witness.r,
            "r_theta": est.witness.r_theta,
            "ratio": est.witness.ratio,
        },
    })
}

/// Pretty JSON with a trailing newline; key order is sorted and stable.
pub fn json_string(value: &Value) -> String {
    let mut body = serde_json::to_string_pretty(value).expect("value serialization");
    body.push('\n');
    body
}

/// Writes one artifact under `dir`, creating the directory if needed.
pub fn write_artifact(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, body.as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{CountQuery, Regime};
    use crate::farey::Window;
    use crate::moebius::GroupPreset;
    use crate::orbit::{expand_orbit, OrbitRequest};
    use num_traits::One;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn float_formatting_is_fixed_width() {
        assert_eq!(format_f64(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(-2.5), "-2.50000000000e0");
        assert_eq!(format_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn rational_parsing_roundtrips_and_snaps() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-7").unwrap(), rat(-7, 1));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat(" 6/8 ").unwrap(), rat(3, 4));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn complex_strings_roundtrip() {
        let z = Grat::from_parts(&rat(-3, 7), &rat(5, 11));
        assert_eq!(grat_str(&z), "-3/7+5/11*i");
        assert_eq!(parse_grat(&grat_str(&z)).unwrap(), z);
        let w = Grat::from_parts(&rat(1, 2), &rat(-2, 9));
        assert_eq!(grat_str(&w), "1/2-2/9*i");
        assert_eq!(parse_grat(&grat_str(&w)).unwrap(), w);
        assert_eq!(parse_grat("5/8").unwrap(), Grat::from_parts(&rat(5, 8), &Rat::zero()));
    }

    proptest! {
        #[test]
        fn grat_roundtrip(re_n in -50i64..50, re_d in 1i64..40, im_n in -50i64..50, im_d in 1i64..40) {
            let z = Grat::from_parts(&rat(re_n, re_d), &rat(im_n, im_d));
            prop_assert_eq!(parse_grat(&grat_str(&z)).unwrap(), z);
        }
    }

    fn sample_record(num: i64, den: i64, k: u32, count: i64) -> CountRecord {
        let q = CountQuery::new(
            PresetName::Modular,
            Grat::from_parts(&rat(num, den), &Rat::zero()),
            rat(1, 8),
            rat(1, 2),
            k,
        )
        .unwrap();
        CountRecord {
            query: q,
            count: BigInt::from(count),
            prediction: 2.0_f64.powi(k as i32) / 4.0,
            regime: Regime::Local,
        }
    }

    #[test]
    fn count_table_is_sorted_and_frozen() {
        let records = vec![sample_record(2, 3, 9, 120), sample_record(1, 3, 8, 70)];
        let csv = count_csv(&records);
        let expect = "z,R,tau,k,count,prediction,ratio,regime\n\
            1/3,1/8,1/2,8,70,6.40000000000e1,1.09375000000e0,local\n\
            2/3,1/8,1/2,9,120,1.28000000000e2,9.37500000000e-1,local\n";
        assert_eq!(csv, expect);
        assert_eq!(count_csv(&[]), "z,R,tau,k,count,prediction,ratio,regime\n");
    }

    #[test]
    fn ford_family_table_has_eleven_rows() {
        let preset = GroupPreset::modular();
        let req = OrbitRequest::for_preset(
            &preset,
            Window::interval(Rat::zero(), Rat::one()),
            rat(1, 25),
        );
        let set = expand_orbit(&req).unwrap();
        let csv = orbit_csv(&set, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tangent_num,tangent_den,diameter_num,diameter_den,word_length");
        assert_eq!(lines.len(), 1 + 11);
        assert_eq!(lines[1].split(',').take(4).collect::<Vec<_>>(), ["0", "1", "1", "1"]);
        assert!(lines.iter().any(|l| l.starts_with("2,5,1,25,")));
    }

    #[test]
    fn plotdata_one_file_per_center() {
        let curves = vec![
            CenterCurve {
                center: Grat::from_parts(&rat(1, 2), &Rat::zero()),
                points: vec![(0.25, 0.5), (0.125, 0.25)],
            },
            CenterCurve {
                center: Grat::from_parts(&rat(1, 3), &rat(-1, 5)),
                points: vec![(0.25, 0.0625)],
            },
        ];
        let files = plotdata(&curves);
        assert_eq!(files.len(), 2);
        assert_eq!(files[0].0, "center_1_2.dat");
        assert_eq!(files[1].0, "center_1_3m1_5xi.dat");
        let body = &files[0].1;
        assert!(body.starts_with("# ln_r ln_value\n"));
        assert_eq!(body.lines().count(), 3);
        assert!(body.ends_with('\n'));
    }

    #[test]
    fn json_output_is_stable_and_key_sorted() {
        let records = vec![sample_record(1, 3, 8, 70), sample_record(2, 3, 9, 120)];
        let band = crate::counting::band_fit(&records).unwrap();
        let v = intermediate_summary(&records, &band);
        let a = json_string(&v);
        let b = json_string(&intermediate_summary(&records, &band));
        assert_eq!(a, b);
        let band_pos = a.find("\"band\"").unwrap();
        let preset_pos = a.find("\"preset\"").unwrap();
        assert!(band_pos < preset_pos);
        assert!(a.ends_with("}\n"));
    }

    #[test]
    fn artifacts_write_under_new_directories() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("nested").join("run");
        let path = write_artifact(&target, "summary.json", "{}\n").unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "{}\n");
    }
}
