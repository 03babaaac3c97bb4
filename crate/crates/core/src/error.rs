//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by signal construction, channel synthesis and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation received an empty buffer where at least one entry is required.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Matrix/vector dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A channel-adaptive design was requested without channel state.
    #[error("method {0} requires a channel argument")]
    MissingChannel(&'static str),

    /// The channel is unusable for the requested design (e.g. all-zero gains).
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// Fourth moment below the square of the second moment.
    #[error("inconsistent moments: m4 = {m4} < m2^2 = {m2_sq}")]
    MomentInconsistency { m4: f64, m2_sq: f64 },

    /// A pilot tone with zero amplitude cannot be inverted.
    #[error("zero pilot amplitude at tone {0}")]
    ZeroPilot(usize),

    /// Too many consecutive degenerate channel draws.
    #[error("gave up after {0} degenerate channel redraws")]
    RedrawLimit(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
