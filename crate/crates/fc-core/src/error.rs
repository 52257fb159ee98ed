//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced while building quantizers, tables, codecs, or pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// Quantizer range is empty or inverted.
    #[error("invalid quantizer range: lo={lo} must be < hi={hi}")]
    InvalidRange { lo: f64, hi: f64 },

    /// Bit width outside the supported 1..=16 range.
    #[error("bit width {bits} out of range (expected 1..=16)")]
    BitsOutOfRange { bits: u32 },

    /// A level or symbol index past the end of its alphabet.
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    /// Alphabet probabilities are negative or do not sum to 1.
    #[error("invalid probability vector: {reason}")]
    InvalidProbabilities { reason: String },

    /// An input outside a target function's declared domain.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// Number of alphabets does not match the function arity.
    #[error("arity mismatch: function takes {expected} inputs, got {got} alphabets")]
    ArityMismatch { expected: usize, got: usize },

    /// Joint alphabet product exceeds the outcome-table cap.
    #[error("outcome table would need {entries} entries (cap {cap})")]
    TableTooLarge { entries: u128, cap: u64 },

    /// Two symbol tuples share a color tuple but disagree on the output.
    /// Indicates a broken coloring; cannot occur for properly built inputs.
    #[error(
        "inconsistent coloring: color tuple {colors:?} maps to output levels {a} and {b}"
    )]
    InconsistentColoring { colors: Vec<usize>, a: u16, b: u16 },

    /// A received color tuple that the decoder table does not cover.
    #[error("unknown color tuple: coordinate {coord} has color {color} but only {count} colors")]
    UnknownColorTuple {
        coord: usize,
        color: usize,
        count: usize,
    },

    /// Frame payload shorter or longer than its layout demands.
    #[error("frame length mismatch: expected {expected} bytes, got {got}")]
    FrameLength { expected: usize, got: usize },

    /// Malformed binary table dump.
    #[error("malformed table dump: {0}")]
    MalformedDump(String),

    /// I/O error while reading or writing artifacts.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
