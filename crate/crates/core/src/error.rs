use thiserror::Error;

/// Broad category of an [`Error`], used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A caller-supplied parameter violated a precondition.
    Validation,
    /// Input data (tag files, histograms) was malformed or unusable.
    Data,
    /// A numerical routine lost too much precision or failed to converge.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mean photon number {0}: must be finite and >= 0")]
    InvalidMean(f64),

    #[error("truncation at n_max={n_max} discards probability {tail:e} (limit {limit:e})")]
    TailMassTooLarge { n_max: usize, tail: f64, limit: f64 },

    #[error("photon number {n} exceeds truncation bound {n_max}")]
    IndexOutOfRange { n: usize, n_max: usize },

    #[error("invalid photon-number distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid detector configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("analytic click statistics require uniform channel weights")]
    NonUniformWeightsUnsupported,

    #[error("at least 2 detectors are required, got {0}")]
    TooFewDetectors(usize),

    #[error("mean click number {mean} is degenerate for {detectors} detectors")]
    DegenerateMean { mean: f64, detectors: usize },

    #[error("moment order {order} out of range 0..={detectors}")]
    OrderOutOfRange { order: usize, detectors: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("histogram has no windows")]
    EmptyHistogram,

    #[error("alternating sum for C_{k} lost precision: estimated absolute error {error:e}")]
    NumericalInstability { k: usize, error: f64 },

    #[error("Jacobi eigen-solver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    EigenNoConvergence { sweeps: usize, residual: f64 },

    #[error("line {line}: malformed record: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: timestamp {timestamp_ps} precedes previous timestamp {previous_ps}")]
    NonMonotonicTimestamp {
        line: usize,
        timestamp_ps: u64,
        previous_ps: u64,
    },

    #[error("line {line}: channel {channel} not declared (channels={channels})")]
    UnknownChannel {
        line: usize,
        channel: u32,
        channels: u32,
    },

    #[error("tag at {timestamp_ps} ps lies beyond the total recording time {total_ps} ps")]
    TagBeyondTotalTime { timestamp_ps: u64, total_ps: u64 },

    #[error("no trigger tags on channel {0}")]
    NoTriggers(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidMean(_)
            | TailMassTooLarge { .. }
            | IndexOutOfRange { .. }
            | InvalidDistribution(_)
            | InvalidConfig(_)
            | InvalidParameter(_)
            | NonUniformWeightsUnsupported
            | TooFewDetectors(_)
            | OrderOutOfRange { .. }
            | DimensionMismatch { .. } => ErrorKind::Validation,
            DegenerateMean { .. }
            | EmptyHistogram
            | MalformedLine { .. }
            | NonMonotonicTimestamp { .. }
            | UnknownChannel { .. }
            | TagBeyondTotalTime { .. }
            | NoTriggers(_)
            | Io(_) => ErrorKind::Data,
            NumericalInstability { .. } | EigenNoConvergence { .. } => ErrorKind::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
