use thiserror::Error;

/// Crate-wide error type. Every message names what went wrong and, for
/// range violations, the offending parameter together with its admissible
/// range, so CLI consumers can print it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse `{input}`: {expected}")]
    Parse { input: String, expected: &'static str },

    #[error("{param} = {value} is outside the admissible range {range}")]
    OutOfRange {
        param: &'static str,
        value: String,
        range: String,
    },

    #[error("radicand {0} is negative; quadratic scalars require s >= 0")]
    NegativeRadicand(String),

    #[error("scalars with radicands {0} and {1} live in different quadratic extensions and cannot be combined")]
    MixedRadicands(String, String),

    #[error("enumeration engine supports at most {cap} legs, got n = {n}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("subset-sum engine requires pure rational lengths; leg {index} is irrational")]
    DpRequiresRational { index: usize },

    #[error("capacity guard: {0}")]
    Capacity(String),

    #[error("length vector is not generic: {0}")]
    NonGeneric(String),

    #[error("grid component count did not stabilize across refinements ({counts:?} at resolutions {resolutions:?}); refine further or increase the margin")]
    Inconclusive {
        resolutions: Vec<usize>,
        counts: Vec<usize>,
    },

    #[error("genericity margin {margin:.6} is below the threshold {threshold:.6}; the sublevel boundary could thread between cell centers")]
    GridMargin { margin: f64, threshold: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
