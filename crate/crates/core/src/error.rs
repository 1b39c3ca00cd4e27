use num_bigint::BigUint;

/// Errors surfaced by the library.
///
/// `ExactInfeasible` is special: it is not a failure of the caller but a
/// statement that no exact route exists at the requested size.  It carries
/// the best bounds we can certify so callers can degrade gracefully.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid inversion vector: {0}")]
    InvalidInversionVector(String),

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what} supports n <= {cap}, got n = {n}")]
    ScaleExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error(
        "exact Chebyshev ball is infeasible at n = {n}, r = {r} \
         (band window {window} bits exceeds {band_cap}, n exceeds Ryser cap {ryser_cap}); \
         certified sandwich: lg >= {lower_lg:.6}, lg <= {upper_lg:.6}"
    )]
    ExactInfeasible {
        n: usize,
        r: u64,
        window: usize,
        band_cap: usize,
        ryser_cap: usize,
        lower_lg: f64,
        upper_lg: f64,
    },

    #[error("code has {size} codewords, above the materialization cap {cap}")]
    MaterializationCap { size: BigUint, cap: u64 },

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
