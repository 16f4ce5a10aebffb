use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration cap exceeded: needs {needed} states, cap is {cap}")]
    CapExceeded { needed: u128, cap: u64 },

    #[error("empty subshift: transition graph is empty after trimming")]
    EmptySubshift,

    #[error("reducible transfer matrix after trimming")]
    ReducibleMatrix,

    #[error("pattern domains overlap at {0}")]
    OverlappingDomains(String),

    #[error("configurations have distinct backgrounds")]
    BackgroundMismatch,

    #[error("potential window too wide: {0}")]
    WindowTooWide(String),

    #[error("patterns are not compatible")]
    IncompatiblePatterns,

    #[error("permutation does not preserve compatibility classes (moves index {0})")]
    ClassBreaking(usize),

    #[error("no admissible interior pattern for the given boundary")]
    NoAdmissibleInterior,

    #[error("boundary region too thin: {0}")]
    BoundaryTooThin(String),

    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
