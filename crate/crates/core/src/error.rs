use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed decimal {input:?} at position {position}: {reason}")]
    Parse {
        input: String,
        position: usize,
        reason: &'static str,
    },

    #[error("value {value} at index {index} lies outside [0, 1]")]
    Domain { index: usize, value: String },

    #[error("{what}: expected {expected} entries, found {found}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("step function is not normalized: integral is {integral}, expected 1")]
    NotNormalized { integral: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("non-finite value encountered at iteration {iteration}: {detail}")]
    Numeric { iteration: usize, detail: String },

    #[error("n = {n} exceeds the enumeration cap {cap}; raise it with --cap or OVERLAP_CAP")]
    Capacity { n: u32, cap: u32 },

    #[error("invalid step-function file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
