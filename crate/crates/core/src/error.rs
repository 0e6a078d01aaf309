use thiserror::Error;

/// Contract violations reported by the structures in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("append at x = {got} does not follow previous x = {prev}")]
    NonMonotoneAppend { prev: u64, got: u64 },
    #[error("join requires every key of the left tree to precede the right tree")]
    JoinOrder,
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid interval [{i}, {j}] for length {len}")]
    InvalidInterval { i: usize, j: usize, len: usize },
    #[error("gamma must lie strictly between 1 and 2 (got {0})")]
    Gamma(f64),
    #[error("exponent r = 1 does not define a covering family")]
    Exponent,
    #[error("epsilon must lie in (0, 1] (got {0})")]
    Epsilon(f64),
    #[error("order handle {0} is not live")]
    StaleHandle(u32),
    #[error("input is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("cover parameters require 1 <= k1 < k2 (got k1 = {k1}, k2 = {k2})")]
    CoverParams { k1: usize, k2: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
