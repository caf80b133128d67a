use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // frame
    #[error("frame must contain at least one label")]
    EmptyFrame,
    #[error("frame has {0} labels; at most 16 are supported")]
    FrameTooLarge(usize),
    #[error("duplicate label `{0}` in frame")]
    DuplicateLabel(String),
    #[error("frame labels must be non-empty strings")]
    EmptyLabel,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("subset bits {bits:#b} out of range for a frame of {size} labels")]
    SubsetOutOfRange { bits: u32, size: usize },
    #[error("operands are defined on different frames")]
    FrameMismatch,

    // mass
    #[error("mass assigned to the empty set")]
    MassOnEmptySet,
    #[error("masses sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("negative mass {0}")]
    NegativeMass(f64),
    #[error("non-finite mass value")]
    NonFiniteMass,
    #[error("total conflict (K = {conflict}) between combined mass functions")]
    TotalConflict { conflict: f64 },
    #[error("discount factor {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("fusion needs at least {needed} mass functions, got {got}")]
    TooFewSources { needed: usize, got: usize },

    // tfn
    #[error("cannot fit a triangular fuzzy number to an empty sample")]
    EmptySample,
    #[error("non-finite feature value")]
    NonFiniteValue,
    #[error("triangular fuzzy number requires a <= b <= c, got ({a}, {b}, {c})")]
    InvalidTfn { a: f64, b: f64, c: f64 },
    #[error("feature index {index} out of range ({count} features)")]
    FeatureOutOfRange { index: usize, count: usize },

    // ifs
    #[error("intuitionistic fuzzy value <{mu}, {nu}> violates 0 <= mu, nu and mu + nu <= 1")]
    InvalidIfv { mu: f64, nu: f64 },
    #[error("subset is not a singleton class")]
    NotASingleton,

    // fri
    #[error("contribution requires at least two classes")]
    DegenerateFrame,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("inconsistent evidence sources: {0}")]
    InconsistentSources(String),

    // baselines
    #[error("class `{0}` has no training vectors")]
    EmptyClass(String),
    #[error("k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("feature vector has {got} components, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    // pipeline
    #[error("cannot read {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("label column `{0}` not found")]
    NoLabelColumn(String),
    #[error("feature column `{0}` not found")]
    NoFeatureColumn(String),
    #[error("every row was dropped while loading `{0}`")]
    AllRowsDropped(String),
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("class `{label}` has {count} samples, too few for the requested split")]
    ClassTooSmall { label: String, count: usize },
    #[error("train fraction {0} outside (0, 1)")]
    InvalidFraction(f64),
    #[error("split leaves an empty partition")]
    EmptyPartition,
    #[error("class `{label}` has no training values for feature `{feature}`")]
    EmptyCell { label: String, feature: String },
    #[error("sweep needs non-empty {0}")]
    EmptySweep(&'static str),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
