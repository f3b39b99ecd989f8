//! Numerical laboratory for ratio list decoding over discrete memoryless
//! channels.
//!
//! The crate is organized around the experiment pipeline:
//!
//! - [`channel`] — finite discrete memoryless channels, block sampling, and
//!   block log-likelihoods;
//! - [`information`] — scalar information functionals and a certified
//!   Blahut-Arimoto capacity solver;
//! - [`codes`] — codebook constructions (i.i.d. random, replicated) and
//!   ratio-function arithmetic `r(M, n)` with permitted list size `L = M/r`;
//! - [`decoding`] — decoding metrics, list decoders, and the score-rank
//!   statistic `Phi` (fraction of codewords scoring at least as high as the
//!   transmitted one);
//! - [`analysis`] — exact (full enumeration) and Monte Carlo error
//!   probabilities plus evaluators for the converse and achievability bounds;
//! - [`rng`] — the counter-based splittable generator that every random
//!   draw in the crate goes through.
//!
//! Probabilities are stored in linear domain; block-level computation happens
//! in natural-log domain (nats) and is converted to bits only for reporting.
//! Zero transition probabilities are represented by the explicit log-zero
//! sentinel [`channel::LOG_ZERO`] rather than a large negative number, so
//! support-sensitive metrics (erasures-only decoding) see exact zeros.

pub mod analysis;
pub mod channel;
pub mod codes;
pub mod decoding;
pub mod information;
pub mod rng;
pub mod stats;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("channel matrix is empty")]
    EmptyMatrix,
    #[error("matrix row {row} has {len} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("channel row {row} sums to {sum:e}, more than 1e-12 away from 1")]
    RowSumMismatch { row: usize, sum: f64 },
    #[error("invalid probability entry {value} at row {row}")]
    InvalidEntry { row: usize, value: f64 },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("distribution sums to {sum:e}, more than 1e-12 away from 1")]
    NotNormalized { sum: f64 },
    #[error("block has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration needs {required} channel outputs, cap is {cap}")]
    EnumerationCapExceeded { required: u128, cap: u64 },
    #[error("replicated codebook would hold {required} codewords, cap is {cap}")]
    ReplicationOverflow { required: u128, cap: u64 },
    #[error("exact score-tail computation infeasible: {0}")]
    ExactPathInfeasible(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use channel::{Block, Channel, Symbol, LOG_ZERO};
pub use codes::{Codebook, RatioEval, RatioFunction};
pub use decoding::{
    classic_decode, list_decode_threshold, list_decode_top_l, phi_count, score_all,
    ClassicDecision, DecodeList, Metric, MetricTable, ScoreVector, TiePolicy,
};
pub use information::{
    binary_divergence, binary_entropy, blahut_arimoto, converse_ratio_rhs, fano_list_rhs,
    identification_list_bound, mutual_information, CapacityResult, Distribution,
};
pub use rng::Stream;
