//! Error types shared across the crate.

use thiserror::Error;

/// A scenario, topology, split, or file-format problem detected before any
/// trials run.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("topology has no links")]
    EmptyTopology,

    #[error("duplicate link `{0}`")]
    DuplicateLink(String),

    #[error("link `{link}`: mean gain must be a finite value >= 0, got {value}")]
    BadMeanGain { link: String, value: f64 },

    #[error("scheme `{scheme}` requires link `{link}`, which the topology does not define")]
    MissingLink { scheme: String, link: String },

    #[error("power split must have at least one fraction")]
    EmptySplit,

    #[error("power split fraction {index} must be a finite value >= 0, got {value}")]
    BadSplitFraction { index: usize, value: f64 },

    #[error("power split fractions must be non-increasing, but fraction {index} ({value}) exceeds its predecessor ({prev})")]
    SplitNotSorted { index: usize, value: f64, prev: f64 },

    #[error("power split fractions must sum to 1 within 1e-9, got {sum}")]
    SplitSum { sum: f64 },

    #[error("scheme `{scheme}` expects {expected} split fraction(s), got {got}")]
    SplitCount {
        scheme: String,
        expected: usize,
        got: usize,
    },

    #[error("scheme `{scheme}` takes no power split")]
    UnexpectedSplit { scheme: String },

    #[error("scheme `{scheme}` expects {expected} relay(s), got {got}")]
    RelayCount {
        scheme: String,
        expected: String,
        got: u32,
    },

    #[error("number of secondary receivers must be >= 1")]
    NoUsers,

    #[error("{name} must be a finite value >= 0, got {value}")]
    BadRate { name: String, value: f64 },

    #[error("scheme `{scheme}` requires a primary rate (`rate.PR`)")]
    MissingPrimaryRate { scheme: String },

    #[error("transmit SNR must be a finite value >= 0, got {value}")]
    BadSnr { value: f64 },

    #[error("interference-to-noise ratio must be a finite value >= 0, got {value}")]
    BadInr { value: f64 },

    #[error("unknown scheme `{got}` (expected one of {expected})")]
    UnknownScheme { got: String, expected: String },

    #[error("unknown preset `{got}` (expected one of {expected})")]
    UnknownPreset { got: String, expected: String },

    #[error("cannot parse `{text}` as a {what}")]
    Parse { what: String, text: String },

    #[error("scenario file: {0}")]
    FileFormat(String),

    #[error("scenario {index}: {source}")]
    Scenario {
        index: usize,
        #[source]
        source: Box<ConfigError>,
    },

    #[error("scenario {index}: unknown rate key `{key}` (expected `PR` or `SR`)")]
    UnknownRateKey { index: usize, key: String },

    #[error("scenario {index}: missing `rate.SR`")]
    MissingSecondaryRate { index: usize },

    #[error("scheme `{0}` appears more than once; each run must use distinct schemes")]
    DuplicateScheme(String),

    #[error("cannot read scenario file `{path}`: {message}")]
    FileRead { path: String, message: String },
}

/// Any failure the simulator can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    /// A structurally valid request with unusable run parameters
    /// (zero trials, empty SNR grid, ...).
    #[error("{0}")]
    Usage(String),

    /// A failure while executing an otherwise valid run.
    #[error("{0}")]
    Runtime(String),
}
