//! `horocount`: horoball counting experiments from the command line.
//!
//! Eleven subcommands map onto the library's experiment entry points. Flags
//! are resolved against an optional flat JSON config (`--config`), flags
//! winning; `--out DIR` mirrors the printed body into artifact files. Exit
//! codes: 0 success, 1 assertion failure, 2 usage error. `HOROCOUNT_THREADS`
//! caps the worker pool inside the library.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use horocount::acceptance::{run_criterion, CRITERION_IDS};
use horocount::arith::rat_f64;
use horocount::centers;
use horocount::counting::{
    band_fit, calibrate, calibration_fixture, continuity_experiment, global_count,
    intermediate_experiment, intermediate_family, local_count_experiment, proximity_sweep,
    CountRecord,
};
use horocount::dimension::{
    assouad_spectrum_estimate, box_dim_estimate, standard_center_grid, CenterCurve, MeasureModel,
    SpectrumEstimate,
};
use horocount::farey::Window;
use horocount::measures::{global_formula_s, mu_s_ball};
use horocount::orbit::{expand_orbit, OrbitRequest};
use horocount::report::{
    box_dim_summary, continuity_csv, continuity_summary, count_csv, formula_summary,
    global_summary, grat_str, intermediate_summary, json_string, local_summary, mass_summary,
    orbit_csv, parse_grat, parse_rat, plotdata, proximity_summary, rat_str, spectrum_summary,
    write_artifact,
};
use horocount::{GroupPreset, Grat, PresetName, Rat};

mod config;
use config::Settings;

/// CLI failure classes; the exit code and error-line prefix follow the class.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag, config entry, or precondition. Exit 2.
    Usage(String),
    /// A run completed but its claimed invariant failed. Exit 1.
    Check(String),
    /// Filesystem or serialization trouble. Exit 1.
    Op(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Op(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "error: usage: {msg}"),
            Failure::Check(msg) => write!(f, "error: check: {msg}"),
            Failure::Op(msg) => write!(f, "error: run: {msg}"),
        }
    }
}

impl From<horocount::Error> for Failure {
    fn from(e: horocount::Error) -> Self {
        use horocount::Error as E;
        match e {
            E::Io(_) | E::Json(_) | E::Fixture(_) => Failure::Op(e.to_string()),
            E::CalibrationFailure(_) | E::TailCertification(_) | E::NonPositivePrediction(_) => {
                Failure::Check(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "horocount",
    version,
    about = "Horoball enumeration, counting experiments, and dimension estimates \
             for the modular and Picard groups in exact arithmetic"
)]
struct Cli {
    /// Flat key-value JSON config; keys are long flag names, flags override.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory to mirror artifacts into (CSV/JSON/plot-data).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the horoball family over a boundary window as CSV.
    Enumerate(EnumerateArgs),
    /// Fit log horoball count against the scale-band index over a window.
    CountGlobal(CountGlobalArgs),
    /// Local-regime ball counts with the calibrated constants.
    CountLocal(CountLocalArgs),
    /// Intermediate-regime counts along a cusp approach family.
    Intermediate(IntermediateArgs),
    /// Randomized proximity dichotomy sweep; every verdict is certified.
    Proximity(ProximityArgs),
    /// Certified atomic measure interval for one ball.
    MeasureBall(MeasureBallArgs),
    /// Three-term global mass formula for one ball.
    GlobalFormula(GlobalFormulaArgs),
    /// Mass ratios along exponents decreasing toward the critical one.
    Continuity(ContinuityArgs),
    /// Box-dimension estimate, or Assouad spectrum when --theta is given.
    Dimension(DimensionArgs),
    /// Grid-search the experiment constants and print them as a fixture.
    Calibrate(CalibrateArgs),
    /// Run acceptance criteria: one PASS/FAIL line each.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    /// Group preset: modular | picard (default modular).
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// `lo,hi` for modular, `x0,x1,y0,y1` for picard (default unit window).
    #[arg(long, value_name = "RATS")]
    window: Option<String>,
    /// Smallest horoball diameter to keep, e.g. `1/25`.
    #[arg(long, value_name = "RAT")]
    min_diam: Option<String>,
}

#[derive(Args)]
struct CountGlobalArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// Band scale base in (0, 1); default 1/2.
    #[arg(long, value_name = "RAT")]
    tau: Option<String>,
    /// First band index (default 8 modular, 4 picard).
    #[arg(long, value_name = "INT")]
    k_min: Option<String>,
    /// Last band index (default 20 modular, 12 picard).
    #[arg(long, value_name = "INT")]
    k_max: Option<String>,
}

#[derive(Args)]
struct CountLocalArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// Must equal the calibrated value; omit to use the fixture.
    #[arg(long, value_name = "RAT")]
    tau: Option<String>,
    /// Must equal the calibrated window constant; omit to use the fixture.
    #[arg(long, value_name = "RAT")]
    c_window: Option<String>,
    /// Extra band depth below the regime threshold (default 6).
    #[arg(long, value_name = "INT")]
    depth: Option<String>,
    /// Comma-separated centers (default: the preset's standard centers).
    #[arg(long, value_name = "GRATS")]
    centers: Option<String>,
    /// Comma-separated ball radii (default: the preset's standard ladder).
    #[arg(long, value_name = "RATS")]
    radii: Option<String>,
}

#[derive(Args)]
struct IntermediateArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// Seed point of the cusp approach family (default: a preset center).
    #[arg(long, value_name = "GRAT")]
    z0: Option<String>,
    /// Must equal the calibrated value; omit to use the fixture.
    #[arg(long, value_name = "RAT")]
    tau: Option<String>,
    /// First family index (default 12 modular, 8 picard).
    #[arg(long, value_name = "INT")]
    n_min: Option<String>,
    /// Last family index (default 60 modular, 30 picard).
    #[arg(long, value_name = "INT")]
    n_max: Option<String>,
}

#[derive(Args)]
struct ProximityArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// Number of certified queries (default 1000).
    #[arg(long, value_name = "INT")]
    n: Option<String>,
    /// RNG seed; required, randomized sweeps must be reproducible.
    #[arg(long, value_name = "INT")]
    seed: Option<String>,
}

#[derive(Args)]
struct MeasureBallArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// Ball center (default: a preset center).
    #[arg(long, value_name = "GRAT")]
    z: Option<String>,
    /// Ball radius (default 1/64).
    #[arg(long, value_name = "RAT")]
    radius: Option<String>,
    /// Conformal exponent above the critical one (default 1.25 / 2.25).
    #[arg(long, value_name = "FLOAT")]
    s: Option<String>,
    /// Atomic truncation cutoff (default scales with 1/radius).
    #[arg(long, value_name = "INT")]
    q_cut: Option<String>,
}

#[derive(Args)]
struct GlobalFormulaArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    #[arg(long, value_name = "GRAT")]
    z: Option<String>,
    #[arg(long, value_name = "RAT")]
    radius: Option<String>,
    #[arg(long, value_name = "FLOAT")]
    s: Option<String>,
    /// Must equal the calibrated value; omit to use the fixture.
    #[arg(long, value_name = "RAT")]
    tau: Option<String>,
    /// Must equal the calibrated window constant; omit to use the fixture.
    #[arg(long, value_name = "RAT")]
    c_window: Option<String>,
}

#[derive(Args)]
struct ContinuityArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// Ball center (default 0, on a cusp).
    #[arg(long, value_name = "GRAT")]
    z: Option<String>,
    /// Ball radius (default 1/64).
    #[arg(long, value_name = "RAT")]
    radius: Option<String>,
    /// Comma-separated exponents strictly decreasing toward the critical one.
    #[arg(long, value_name = "FLOATS")]
    s_list: Option<String>,
    /// Atomic truncation cutoff (default 4096).
    #[arg(long, value_name = "INT")]
    q_cut: Option<String>,
}

#[derive(Args)]
struct DimensionArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// critical | atomic. Atomic picard runs are expensive at deep ladders.
    #[arg(long, value_name = "KIND")]
    measure: Option<String>,
    /// Exponent for the atomic measure (default 1.25 / 2.25).
    #[arg(long, value_name = "FLOAT")]
    s: Option<String>,
    /// Assouad spectrum parameter in (0, 1); omit for the box estimate.
    #[arg(long, value_name = "RAT")]
    theta: Option<String>,
    /// Shallowest dyadic ladder exponent (default 5, spectrum 4).
    #[arg(long, value_name = "INT")]
    k_min: Option<String>,
    /// Deepest dyadic ladder exponent (default 12).
    #[arg(long, value_name = "INT")]
    k_max: Option<String>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, value_name = "NAME")]
    group: Option<String>,
    /// Comma-separated tau candidates (default 1/2,1/3,1/4).
    #[arg(long, value_name = "RATS")]
    taus: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or one criterion id a1..a9 (default all).
    #[arg(long, value_name = "SUITE")]
    suite: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = run(cli) {
        eprintln!("{failure}");
        std::process::exit(failure.code());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::empty(),
    };
    let emit = Emitter { out: cli.out.clone() };
    match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, &cfg, &emit),
        Command::CountGlobal(a) => cmd_count_global(a, &cfg, &emit),
        Command::CountLocal(a) => cmd_count_local(a, &cfg, &emit),
        Command::Intermediate(a) => cmd_intermediate(a, &cfg, &emit),
        Command::Proximity(a) => cmd_proximity(a, &cfg, &emit),
        Command::MeasureBall(a) => cmd_measure_ball(a, &cfg, &emit),
        Command::GlobalFormula(a) => cmd_global_formula(a, &cfg, &emit),
        Command::Continuity(a) => cmd_continuity(a, &cfg, &emit),
        Command::Dimension(a) => cmd_dimension(a, &cfg, &emit),
        Command::Calibrate(a) => cmd_calibrate(a, &cfg, &emit),
        Command::Verify(a) => cmd_verify(a, &cfg, &emit),
    }
}

/// Prints the primary body to stdout and mirrors artifacts under `--out`.
struct Emitter {
    out: Option<PathBuf>,
}

impl Emitter {
    fn primary(&self, name: &str, body: &str) -> Result<(), Failure> {
        print!("{body}");
        self.save(name, body)
    }

    fn save(&self, name: &str, body: &str) -> Result<(), Failure> {
        if let Some(dir) = &self.out {
            write_artifact(dir, name, body).map_err(Failure::from)?;
        }
        Ok(())
    }
}

fn resolve<'a>(flag: &'a Option<String>, cfg: &'a Settings, key: &str) -> Option<&'a str> {
    flag.as_deref().or_else(|| cfg.get(key))
}

fn resolve_preset(flag: &Option<String>, cfg: &Settings) -> Result<PresetName, Failure> {
    match resolve(flag, cfg, "group") {
        None => Ok(PresetName::Modular),
        Some(s) => s
            .parse::<PresetName>()
            .map_err(|e| Failure::Usage(format!("--group: {e}"))),
    }
}

fn parse_rat_key(s: &str, key: &str) -> Result<Rat, Failure> {
    parse_rat(s).map_err(|e| Failure::Usage(format!("--{key}: {e}")))
}

fn parse_grat_key(s: &str, key: &str) -> Result<Grat, Failure> {
    parse_grat(s).map_err(|e| Failure::Usage(format!("--{key}: {e}")))
}

fn parse_u32_key(s: &str, key: &str) -> Result<u32, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("--{key}: `{s}` is not a small non-negative integer")))
}

fn parse_u64_key(s: &str, key: &str) -> Result<u64, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("--{key}: `{s}` is not a non-negative integer")))
}

fn parse_usize_key(s: &str, key: &str) -> Result<usize, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("--{key}: `{s}` is not a count")))
}

fn parse_f64_key(s: &str, key: &str) -> Result<f64, Failure> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("--{key}: `{s}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Usage(format!("--{key}: `{s}` is not finite")))
    }
}

fn parse_rat_list_key(s: &str, key: &str) -> Result<Vec<Rat>, Failure> {
    s.split(',').map(|part| parse_rat_key(part, key)).collect()
}

fn parse_grat_list_key(s: &str, key: &str) -> Result<Vec<Grat>, Failure> {
    s.split(',').map(|part| parse_grat_key(part, key)).collect()
}

fn parse_f64_list_key(s: &str, key: &str) -> Result<Vec<f64>, Failure> {
    s.split(',').map(|part| parse_f64_key(part, key)).collect()
}

/// Calibrated constants may be restated on the command line but only with
/// their fixture values; anything else is a usage error.
fn pinned_rat(
    flag: &Option<String>,
    cfg: &Settings,
    key: &str,
    fixture: Rat,
) -> Result<Rat, Failure> {
    match resolve(flag, cfg, key) {
        None => Ok(fixture),
        Some(s) => {
            let value = parse_rat_key(s, key)?;
            if value == fixture {
                Ok(value)
            } else {
                Err(Failure::Usage(format!(
                    "--{key}: `{s}` is not the calibrated value {}; run `horocount \
                     calibrate` and commit a new fixture to change it",
                    rat_str(&fixture)
                )))
            }
        }
    }
}

fn require<'a>(value: Option<&'a str>, key: &str) -> Result<&'a str, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing --{key}")))
}

fn parse_window(s: &str, preset: PresetName) -> Result<Window, Failure> {
    let parts: Vec<Rat> = parse_rat_list_key(s, "window")?;
    match (preset, parts.as_slice()) {
        (PresetName::Modular, [lo, hi]) => Ok(Window::interval(lo.clone(), hi.clone())),
        (PresetName::Picard, [x0, x1, y0, y1]) => {
            Ok(Window::rect(x0.clone(), x1.clone(), y0.clone(), y1.clone()))
        }
        _ => Err(Failure::Usage(format!(
            "--window: expected `lo,hi` for modular or `x0,x1,y0,y1` for picard, got `{s}`"
        ))),
    }
}

fn default_center(preset: PresetName) -> Grat {
    match preset {
        PresetName::Modular => centers::golden().clone(),
        PresetName::Picard => centers::picard_calibration_centers()[0].clone(),
    }
}

fn dyadic_ladder(k_min: u32, k_max: u32) -> Result<Vec<Rat>, Failure> {
    if k_min == 0 || k_min > k_max {
        return Err(Failure::Usage(format!(
            "--k-min/--k-max: need 1 <= k-min <= k-max, got {k_min}..{k_max}"
        )));
    }
    if k_max > 40 {
        return Err(Failure::Usage(format!(
            "--k-max: ladder exponent {k_max} is too deep to enumerate"
        )));
    }
    (k_min..=k_max)
        .map(|k| parse_rat_key(&format!("1/{}", 1u64 << k), "k-max"))
        .collect()
}

/// Extreme record named in band-gate failures.
fn extreme_record(records: &[CountRecord]) -> String {
    let extreme = records.iter().max_by(|a, b| {
        let da = (a.ratio().ln()).abs();
        let db = (b.ratio().ln()).abs();
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
    });
    match extreme {
        Some(rec) => format!(
            "z={}, R={}, k={}, count={}, ratio={:.6}",
            grat_str(&rec.query.z),
            rat_str(&rec.query.r),
            rec.query.k,
            rec.count,
            rec.ratio()
        ),
        None => "no records".into(),
    }
}

/// Regression gate: a fresh band may not exceed twice the committed fixture.
fn band_gate(
    invariant: &str,
    observed: f64,
    fixture_band: f64,
    records: &[CountRecord],
) -> Result<(), Failure> {
    let allowed = 2.0 * fixture_band;
    if observed <= allowed {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{invariant}: band spread {observed:.6} exceeds the fixture allowance \
             {allowed:.6}; extreme record {}",
            extreme_record(records)
        )))
    }
}

fn cmd_enumerate(a: &EnumerateArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let window = match resolve(&a.window, cfg, "window") {
        None => Window::unit(preset),
        Some(s) => parse_window(s, preset)?,
    };
    let min_diam = parse_rat_key(require(resolve(&a.min_diam, cfg, "min-diam"), "min-diam")?, "min-diam")?;
    if rat_f64(&min_diam) <= 0.0 {
        return Err(Failure::Usage("--min-diam: must be positive".into()));
    }
    let group = GroupPreset::new(preset);
    let req = OrbitRequest::for_preset(&group, window, min_diam);
    let set = expand_orbit(&req)?;
    let csv = orbit_csv(&set, preset == PresetName::Picard);
    emit.primary("enumerate.csv", &csv)
}

fn cmd_count_global(a: &CountGlobalArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let tau = match resolve(&a.tau, cfg, "tau") {
        None => parse_rat_key("1/2", "tau")?,
        Some(s) => parse_rat_key(s, "tau")?,
    };
    let (dk_min, dk_max) = match preset {
        PresetName::Modular => (8, 20),
        PresetName::Picard => (4, 12),
    };
    let k_min = match resolve(&a.k_min, cfg, "k-min") {
        None => dk_min,
        Some(s) => parse_u32_key(s, "k-min")?,
    };
    let k_max = match resolve(&a.k_max, cfg, "k-max") {
        None => dk_max,
        Some(s) => parse_u32_key(s, "k-max")?,
    };
    if k_min > k_max {
        return Err(Failure::Usage(format!(
            "--k-min/--k-max: need k-min <= k-max, got {k_min}..{k_max}"
        )));
    }
    let fit = global_count(preset, &tau, k_min..=k_max)?;
    emit.save("global.csv", &count_csv(&fit.records))?;
    emit.primary("global.json", &json_string(&global_summary(&fit)))
}

fn cmd_count_local(a: &CountLocalArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let fixture = calibration_fixture(preset)?;
    let tau = pinned_rat(&a.tau, cfg, "tau", fixture.tau_rat())?;
    let c_window = pinned_rat(&a.c_window, cfg, "c-window", fixture.c_window_rat())?;
    let depth = match resolve(&a.depth, cfg, "depth") {
        None => 6,
        Some(s) => parse_u32_key(s, "depth")?,
    };
    let z_list = match resolve(&a.centers, cfg, "centers") {
        None => match preset {
            PresetName::Modular => centers::modular_centers(),
            PresetName::Picard => centers::picard_calibration_centers(),
        },
        Some(s) => parse_grat_list_key(s, "centers")?,
    };
    let r_list = match resolve(&a.radii, cfg, "radii") {
        None => match preset {
            PresetName::Modular => parse_rat_list_key("1/16,1/32,1/64,1/128,1/256", "radii")?,
            PresetName::Picard => parse_rat_list_key("1/8,1/16", "radii")?,
        },
        Some(s) => parse_rat_list_key(s, "radii")?,
    };
    let exp = local_count_experiment(preset, &z_list, &r_list, &tau, &c_window, depth)?;
    emit.save("local.csv", &count_csv(&exp.records))?;
    emit.primary("local.json", &json_string(&local_summary(&exp)))?;
    band_gate("local count comparability", exp.band.spread(), fixture.local_band, &exp.records)
}

fn cmd_intermediate(a: &IntermediateArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let fixture = calibration_fixture(preset)?;
    let tau = pinned_rat(&a.tau, cfg, "tau", fixture.tau_rat())?;
    let z0 = match resolve(&a.z0, cfg, "z0") {
        None => default_center(preset),
        Some(s) => parse_grat_key(s, "z0")?,
    };
    let (dn_min, dn_max) = match preset {
        PresetName::Modular => (12, 60),
        PresetName::Picard => (8, 30),
    };
    let n_min = match resolve(&a.n_min, cfg, "n-min") {
        None => dn_min,
        Some(s) => parse_u64_key(s, "n-min")?,
    };
    let n_max = match resolve(&a.n_max, cfg, "n-max") {
        None => dn_max,
        Some(s) => parse_u64_key(s, "n-max")?,
    };
    if n_min > n_max {
        return Err(Failure::Usage(format!(
            "--n-min/--n-max: need n-min <= n-max, got {n_min}..{n_max}"
        )));
    }
    let family = intermediate_family(
        preset,
        &z0,
        &tau,
        &fixture.c1_rat(),
        &fixture.c2_rat(),
        n_min..=n_max,
    )?;
    let records: Vec<CountRecord> = family
        .iter()
        .map(intermediate_experiment)
        .collect::<horocount::Result<_>>()?;
    let band = band_fit(&records)?;
    emit.save("intermediate.csv", &count_csv(&records))?;
    emit.primary("intermediate.json", &json_string(&intermediate_summary(&records, &band)))?;
    band_gate(
        "intermediate count comparability",
        band.spread(),
        fixture.intermediate_band,
        &records,
    )
}

fn cmd_proximity(a: &ProximityArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let n = match resolve(&a.n, cfg, "n") {
        None => 1000,
        Some(s) => parse_usize_key(s, "n")?,
    };
    let seed_text = resolve(&a.seed, cfg, "seed").ok_or_else(|| {
        Failure::Usage("missing --seed: randomized sweeps must be reproducible".into())
    })?;
    let seed = parse_u64_key(seed_text, "seed")?;
    let sweep = proximity_sweep(preset, n, seed)?;
    emit.primary("proximity.json", &json_string(&proximity_summary(&sweep)))?;
    if sweep.violations > 0 {
        Err(Failure::Check(format!(
            "proximity dichotomy: {} of {} certified queries admit more than one \
             qualifying horoball (max count {})",
            sweep.violations, sweep.queries, sweep.max_count
        )))
    } else {
        Ok(())
    }
}

/// Shared center/radius/exponent resolution for the single-ball commands.
fn ball_params(
    preset: PresetName,
    z: &Option<String>,
    radius: &Option<String>,
    s: &Option<String>,
    cfg: &Settings,
) -> Result<(Grat, Rat, f64), Failure> {
    let z = match resolve(z, cfg, "z") {
        None => default_center(preset),
        Some(text) => parse_grat_key(text, "z")?,
    };
    let r = match resolve(radius, cfg, "radius") {
        None => parse_rat_key("1/64", "radius")?,
        Some(text) => parse_rat_key(text, "radius")?,
    };
    if rat_f64(&r) <= 0.0 {
        return Err(Failure::Usage("--radius: must be positive".into()));
    }
    let default_s = match preset {
        PresetName::Modular => 1.25,
        PresetName::Picard => 2.25,
    };
    let s = match resolve(s, cfg, "s") {
        None => default_s,
        Some(text) => parse_f64_key(text, "s")?,
    };
    Ok((z, r, s))
}

fn default_q_cut(preset: PresetName, r: &Rat) -> u64 {
    let per_radius = match preset {
        PresetName::Modular => 32.0,
        PresetName::Picard => 8.0,
    };
    (per_radius / rat_f64(r)).ceil().max(16.0) as u64
}

fn cmd_measure_ball(a: &MeasureBallArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let (z, r, s) = ball_params(preset, &a.z, &a.radius, &a.s, cfg)?;
    let q_cut = match resolve(&a.q_cut, cfg, "q-cut") {
        None => default_q_cut(preset, &r),
        Some(text) => parse_u64_key(text, "q-cut")?,
    };
    let group = GroupPreset::new(preset);
    let interval = mu_s_ball(&group, &z, &r, s, q_cut)?;
    emit.primary("mass.json", &json_string(&mass_summary(preset, &z, &r, s, q_cut, &interval)))
}

fn cmd_global_formula(a: &GlobalFormulaArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let (z, r, s) = ball_params(preset, &a.z, &a.radius, &a.s, cfg)?;
    let fixture = calibration_fixture(preset)?;
    let tau = pinned_rat(&a.tau, cfg, "tau", fixture.tau_rat())?;
    let c_window = pinned_rat(&a.c_window, cfg, "c-window", fixture.c_window_rat())?;
    let group = GroupPreset::new(preset);
    let terms = global_formula_s(&group, &z, &r, s, &tau, &c_window)?;
    emit.primary("formula.json", &json_string(&formula_summary(preset, &z, &r, s, &terms)))
}

fn cmd_continuity(a: &ContinuityArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let z = match resolve(&a.z, cfg, "z") {
        None => Grat::from_int(0),
        Some(text) => parse_grat_key(text, "z")?,
    };
    let r = match resolve(&a.radius, cfg, "radius") {
        None => parse_rat_key("1/64", "radius")?,
        Some(text) => parse_rat_key(text, "radius")?,
    };
    let s_list = match resolve(&a.s_list, cfg, "s-list") {
        None => vec![1.2, 1.1, 1.05, 1.01],
        Some(text) => parse_f64_list_key(text, "s-list")?,
    };
    let q_cut = match resolve(&a.q_cut, cfg, "q-cut") {
        None => 4096,
        Some(text) => parse_u64_key(text, "q-cut")?,
    };
    let table = continuity_experiment(preset, &z, &r, &s_list, q_cut)?;
    emit.save("continuity.csv", &continuity_csv(&table))?;
    emit.primary("continuity.json", &json_string(&continuity_summary(&table, preset, &z)))
}

/// Per-center concentric-ratio curves for the spectrum plot-data files.
fn spectrum_curves(est: &SpectrumEstimate) -> Vec<CenterCurve> {
    let mut curves: Vec<CenterCurve> = Vec::new();
    for row in &est.rows {
        match curves.iter_mut().find(|c| c.center == row.center) {
            Some(curve) => curve.points.push((row.r, row.ratio)),
            None => curves.push(CenterCurve {
                center: row.center.clone(),
                points: vec![(row.r, row.ratio)],
            }),
        }
    }
    curves
}

fn cmd_dimension(a: &DimensionArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let measure = resolve(&a.measure, cfg, "measure").unwrap_or("critical");
    let model = match measure {
        "critical" => MeasureModel::PattersonSullivan { preset },
        "atomic" => {
            let default_s = match preset {
                PresetName::Modular => 1.25,
                PresetName::Picard => 2.25,
            };
            let s = match resolve(&a.s, cfg, "s") {
                None => default_s,
                Some(text) => parse_f64_key(text, "s")?,
            };
            MeasureModel::Conformal { preset, s }
        }
        other => {
            return Err(Failure::Usage(format!(
                "--measure: `{other}` is neither `critical` nor `atomic`"
            )))
        }
    };
    let theta = match resolve(&a.theta, cfg, "theta") {
        None => None,
        Some(text) => Some(parse_rat_key(text, "theta")?),
    };
    let dk_min = if theta.is_some() { 4 } else { 5 };
    let k_min = match resolve(&a.k_min, cfg, "k-min") {
        None => dk_min,
        Some(text) => parse_u32_key(text, "k-min")?,
    };
    let k_max = match resolve(&a.k_max, cfg, "k-max") {
        None => 12,
        Some(text) => parse_u32_key(text, "k-max")?,
    };
    let r_list = dyadic_ladder(k_min, k_max)?;
    let grid = standard_center_grid(preset, &r_list);
    match theta {
        None => {
            let est = box_dim_estimate(&model, &r_list, &grid)?;
            for (name, body) in plotdata(&est.curves) {
                emit.save(&name, &body)?;
            }
            emit.primary("box.json", &json_string(&box_dim_summary(&model, &est)))
        }
        Some(theta) => {
            let est = assouad_spectrum_estimate(&model, &theta, &r_list, &grid)?;
            for (name, body) in plotdata(&spectrum_curves(&est)) {
                emit.save(&name, &body)?;
            }
            emit.primary("spectrum.json", &json_string(&spectrum_summary(&model, &est)))
        }
    }
}

fn cmd_calibrate(a: &CalibrateArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let preset = resolve_preset(&a.group, cfg)?;
    let taus = match resolve(&a.taus, cfg, "taus") {
        None => parse_rat_list_key("1/2,1/3,1/4", "taus")?,
        Some(text) => parse_rat_list_key(text, "taus")?,
    };
    let cal = calibrate(preset, &taus)?;
    let value = serde_json::to_value(&cal).map_err(|e| Failure::Op(e.to_string()))?;
    emit.primary("calibration.json", &json_string(&value))
}

fn cmd_verify(a: &VerifyArgs, cfg: &Settings, emit: &Emitter) -> Result<(), Failure> {
    let suite = resolve(&a.suite, cfg, "suite").unwrap_or("all");
    let ids: Vec<String> = if suite.eq_ignore_ascii_case("all") {
        CRITERION_IDS.iter().map(|id| id.to_string()).collect()
    } else {
        vec![suite.to_string()]
    };
    let mut lines = String::new();
    let mut all_pass = true;
    for id in &ids {
        let report = run_criterion(id)?;
        let line = report.line();
        println!("{line}");
        lines.push_str(&line);
        lines.push('\n');
        all_pass &= report.passed;
    }
    emit.save("verify.txt", &lines)?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Check(
            "acceptance suite failed; the FAIL lines above name the violated criteria".into(),
        ))
    }
}
