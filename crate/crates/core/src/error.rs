//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by analytics, simulation, metrics, estimation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A model or simulation parameter violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `t` must be strictly positive for relative-error evaluation.
    #[error("separation time must be strictly positive (got {0})")]
    NonPositiveTime(f64),

    /// The 95% band crosses zero: the statistic carries no usable dating
    /// signal at this horizon.
    #[error("confidence band collapses at t = {t} for {statistic}: mean - 2*sd <= 0")]
    BandCollapse { statistic: String, t: f64 },

    /// An observed statistic of zero means the lists retain no trace of a
    /// common ancestor; the dating logarithm diverges.
    #[error("statistic value {0} carries no common-ancestor signal (must be > 0)")]
    NoAncestorSignal(f64),

    /// Observed statistic outside its admissible range.
    #[error("statistic value {0} outside (0, 1]")]
    StatisticOutOfRange(f64),

    /// Grid specification for a curve or sweep is malformed.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Words of different length passed to a positional comparison.
    #[error("length mismatch: {left} vs {right} symbols")]
    LengthMismatch { left: usize, right: usize },

    /// Both words empty where at least one symbol is required.
    #[error("cannot compare empty words")]
    EmptyWord,

    /// No concept had both entries present (and known cognacy), so no
    /// statistic is defined.
    #[error("no comparable concepts between the two lists")]
    NoComparableConcepts,

    /// Too few admissible language pairs for a stable average.
    #[error("insufficient language pairs: {available} available, {required} required")]
    InsufficientPairs { available: usize, required: usize },

    /// Cross-concept match frequency is zero, so the effective alphabet
    /// size is unbounded.
    #[error("mean cross-concept match frequency is zero: effective alphabet size unbounded")]
    UnboundedAlphabet,

    /// The logarithm argument of a rate estimator is non-positive: the
    /// distance signal is saturated and the rate cannot be resolved.
    #[error("rate estimator saturated: mean overlap signal {0} <= 0")]
    SignalSaturated(f64),

    /// No usable word pairs in a dataset average.
    #[error("no usable word pairs in dataset")]
    NoUsablePairs,

    /// A dataset average is degenerate in a way that makes an estimator
    /// diverge.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Structural or referential defect in an input file.
    #[error("{path}:{line}: {message}")]
    Dataset {
        path: String,
        line: u64,
        message: String,
    },

    /// Malformed configuration file.
    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
