use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by origin: field/matrix algebra, network ingestion,
/// combinatorial caps, and randomized constructions that ran out of retries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime; the field modulus must be a prime number")]
    NotPrime(u64),

    #[error("matrix is not square ({rows}x{cols}); inversion requires a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular and has no inverse")]
    Singular,

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid JSON: {0}")]
    Parse(String),

    #[error("invalid network: {0}")]
    Validation(String),

    #[error("network has {nodes} nodes; cut enumeration is capped at {cap} (2^(n-2) cuts)")]
    TooManyNodes { nodes: usize, cap: usize },

    #[error("uniform wiretap strength z={z} exceeds the {edges} edges crossing the cut")]
    ZTooLarge { z: usize, edges: usize },

    #[error("edge {0:?} does not cross the cut")]
    NotACutEdge(String),

    #[error(
        "no draw over F_{q} certified all subset ranks after {attempts} attempts; \
         still short: {diagnostics} (try a larger field)"
    )]
    RetriesExhausted {
        q: u64,
        attempts: u32,
        diagnostics: String,
    },

    #[error("search space of {states} states exceeds the cap of {cap}")]
    TooLarge { states: u128, cap: u64 },

    #[error(
        "no assignment over F_{q} attains every subset's maximum rank simultaneously \
         (per-subset maxima {maxima:?})"
    )]
    NoSimultaneousMaximizer { q: u64, maxima: Vec<usize> },

    #[error("partition labeling failed: {0}")]
    MaximalityViolated(String),

    #[error("secret rate would be {r_s}; there is no positive rate to achieve at this cut")]
    NoSecrecyCapacity { r_s: i64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
