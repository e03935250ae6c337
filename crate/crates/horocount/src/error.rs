use thiserror::Error;

/// Crate-wide error type. Variants mirror the contract failures of the public
/// operations; everything else panics only on internal invariant breakage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown group preset `{0}`")]
    UnknownPreset(String),

    #[error("matrix is not unimodular: det = {0}")]
    NotUnimodular(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("measures are only defined for the arithmetic presets ({0})")]
    UnsupportedMeasure(String),

    #[error("atomic measure diverges: s = {s} must exceed delta = {delta}")]
    DivergentModel { s: f64, delta: f64 },

    #[error("truncation cutoff too small: {0}; increase q_cut")]
    IncreaseQCut(String),

    #[error("tail certification failed: {0}")]
    TailCertification(String),

    #[error("too few samples: {0}")]
    TooFewSamples(String),

    #[error("calibration failed: {0}")]
    CalibrationFailure(String),

    #[error("regression needs at least {need} points, got {got}")]
    RegressionPoints { need: usize, got: usize },

    #[error("band fit over empty record set")]
    EmptyRecords,

    #[error("prediction must be positive, got {0}")]
    NonPositivePrediction(f64),

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
