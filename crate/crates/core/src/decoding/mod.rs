//! Decoding metrics, list decoders, and the score-rank statistic.
//!
//! A decoder here never exploits code structure: it sees a vector of metric
//! scores, one per message, and forms a list. Score comparison is exact
//! ordering on extended reals; the log-zero sentinel [`LOG_ZERO`] compares
//! below every finite score and equal to itself, which pins down ties for
//! matched and erasures-only metrics on channels with zero transitions.
//!
//! Two tie policies are first class because a constant-size list does not
//! determine the decoder uniquely: [`TiePolicy::LowestIndex`] always emits
//! exactly `L` messages, while [`TiePolicy::RejectTies`] drops the whole
//! boundary-tied score group, which makes list membership imply that
//! strictly fewer than `L` other messages score at least as high.

mod phi;

pub use phi::{
    phi_random_coding, phi_random_coding_mc, phi_random_coding_with, PhiEstimate, PhiOptions,
};
pub(crate) use phi::{common_scale, letter_dist, ScoreDist};

use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{Block, Channel, Symbol, LOG_ZERO};
use crate::codes::Codebook;
use crate::{Error, Result};

/// Per-letter additive score table with finite real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    input_size: usize,
    output_size: usize,
    values: Vec<Vec<f64>>,
}

impl MetricTable {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() || values[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let output_size = values[0].len();
        for (row, r) in values.iter().enumerate() {
            if r.len() != output_size {
                return Err(Error::RaggedMatrix {
                    row,
                    len: r.len(),
                    expected: output_size,
                });
            }
            for &v in r {
                if !v.is_finite() {
                    return Err(Error::InvalidEntry { row, value: v });
                }
            }
        }
        Ok(MetricTable {
            input_size: values.len(),
            output_size,
            values,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    #[inline]
    pub fn value(&self, x: Symbol, y: Symbol) -> f64 {
        self.values[x as usize][y as usize]
    }

    /// Parses the additive metric table format: header `|X| |Y|`, then the
    /// real-valued table rows; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            message: "expected header \"|X| |Y|\"".into(),
                        });
                    }
                    let nx = fields[0].parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        message: format!("invalid integer {:?}", fields[0]),
                    })?;
                    let ny = fields[1].parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        message: format!("invalid integer {:?}", fields[1]),
                    })?;
                    header = Some((nx, ny));
                }
                Some((nx, ny)) => {
                    if rows.len() == nx {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            message: format!("expected exactly {nx} rows"),
                        });
                    }
                    if fields.len() != ny {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            message: format!("expected {ny} entries, found {}", fields.len()),
                        });
                    }
                    let row = fields
                        .iter()
                        .map(|f| {
                            f.parse::<f64>().map_err(|_| Error::Parse {
                                line: lineno + 1,
                                message: format!("invalid number {f:?}"),
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    rows.push(row);
                }
            }
        }
        let (nx, _) = header.ok_or(Error::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        if rows.len() != nx {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected {nx} rows, found {}", rows.len()),
            });
        }
        MetricTable::new(rows)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        MetricTable::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.input_size, self.output_size);
        for row in &self.values {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(out, "{}", fields.join(" "));
        }
        out
    }
}

/// Decoding metric kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Block log-likelihood of a reference channel (nats, may be the
    /// log-zero sentinel).
    Matched(Channel),
    /// Additive per-letter real table.
    Additive(MetricTable),
    /// Additive with `q(x, y) = 1{x == y}`.
    Hamming,
    /// `q = 1{W^n(y|x) > 0}` for a reference channel; block scores are 0/1.
    ErasuresOnly(Channel),
}

impl Metric {
    /// Checks the metric against a codebook alphabet and an output alphabet.
    pub fn validate_alphabets(&self, max_input: usize, max_output: usize) -> Result<()> {
        let check = |nx: usize, ny: usize, what: &str| -> Result<()> {
            if max_input > nx || max_output > ny {
                return Err(Error::DimensionMismatch(format!(
                    "{what} covers {nx} inputs x {ny} outputs, needed {max_input} x {max_output}"
                )));
            }
            Ok(())
        };
        match self {
            Metric::Matched(ch) | Metric::ErasuresOnly(ch) => check(
                ch.input_size(),
                ch.output_size(),
                "metric reference channel",
            ),
            Metric::Additive(t) => check(t.input_size(), t.output_size(), "metric table"),
            Metric::Hamming => Ok(()),
        }
    }

    /// Block score `q_n(x, y)`; validates lengths and symbol ranges.
    pub fn score(&self, x: &Block, y: &Block) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                got: y.len(),
                expected: x.len(),
            });
        }
        match self {
            Metric::Matched(ch) | Metric::ErasuresOnly(ch) => {
                x.validate_alphabet(ch.input_size())?;
                y.validate_alphabet(ch.output_size())?;
            }
            Metric::Additive(t) => {
                x.validate_alphabet(t.input_size())?;
                y.validate_alphabet(t.output_size())?;
            }
            Metric::Hamming => {}
        }
        Ok(self.score_unchecked(x, y))
    }

    /// Block score without validation; callers must have checked alphabets.
    pub(crate) fn score_unchecked(&self, x: &Block, y: &Block) -> f64 {
        self.score_symbols(x.symbols(), y.symbols())
    }

    pub(crate) fn score_symbols(&self, x: &[Symbol], y: &[Symbol]) -> f64 {
        match self {
            Metric::Matched(ch) => {
                let mut total = 0.0;
                for (&xi, &yi) in x.iter().zip(y) {
                    let l = ch.log_transition(xi, yi);
                    if l == LOG_ZERO {
                        return LOG_ZERO;
                    }
                    total += l;
                }
                total
            }
            Metric::Additive(t) => x
                .iter()
                .zip(y)
                .fold(0.0, |acc, (&xi, &yi)| acc + t.value(xi, yi)),
            Metric::Hamming => x
                .iter()
                .zip(y)
                .fold(0.0, |acc, (&xi, &yi)| acc + f64::from(u8::from(xi == yi))),
            Metric::ErasuresOnly(ch) => {
                let supported = x
                    .iter()
                    .zip(y)
                    .all(|(&xi, &yi)| ch.transition(xi, yi) > 0.0);
                if supported {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Per-letter additive score; not defined for the erasures-only kind,
    /// whose block score is an indicator rather than a sum.
    pub(crate) fn letter_score(&self, x: Symbol, y: Symbol) -> f64 {
        match self {
            Metric::Matched(ch) => ch.log_transition(x, y),
            Metric::Additive(t) => t.value(x, y),
            Metric::Hamming => f64::from(u8::from(x == y)),
            Metric::ErasuresOnly(_) => unreachable!("erasures-only metric is not additive"),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Metric::Matched(_) => "matched",
            Metric::Additive(_) => "additive",
            Metric::Hamming => "hamming",
            Metric::ErasuresOnly(_) => "erasures_only",
        }
    }
}

/// Per-message scores for one channel output block.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
}

impl ScoreVector {
    /// # Panics
    ///
    /// Panics if any score is NaN; scores are extended reals.
    pub fn new(scores: Vec<f64>) -> Self {
        assert!(
            scores.iter().all(|s| !s.is_nan()),
            "scores must be extended reals, found NaN"
        );
        ScoreVector { scores }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    #[inline]
    pub fn get(&self, m: usize) -> f64 {
        self.scores[m]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }

    /// Number of messages scoring at least `s` (duplicates counted).
    pub fn count_at_least(&self, s: f64) -> usize {
        self.scores.iter().filter(|&&v| v >= s).count()
    }
}

/// Scores every codeword of `cb` against the output block `y`.
pub fn score_all(metric: &Metric, cb: &Codebook, y: &Block) -> Result<ScoreVector> {
    if y.len() != cb.n() {
        return Err(Error::LengthMismatch {
            got: y.len(),
            expected: cb.n(),
        });
    }
    let max_in = cb.max_symbol() as usize + 1;
    let max_out = y.symbols().iter().map(|&s| s as usize + 1).max().unwrap_or(1);
    metric.validate_alphabets(max_in, max_out)?;
    Ok(ScoreVector {
        scores: cb
            .codewords()
            .iter()
            .map(|cw| metric.score_unchecked(cw, y))
            .collect(),
    })
}

/// How a constant-size list decoder resolves ties at the list boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// Break boundary ties toward smaller message index; the list always
    /// has exactly `L` members.
    LowestIndex,
    /// Exclude every message tied at the boundary; the list may be shorter
    /// than `L`, possibly empty.
    RejectTies,
}

/// A decoded list of message indices (sorted ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeList {
    members: Vec<usize>,
    tie_flag: bool,
}

impl DecodeList {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn list_size(&self) -> usize {
        self.members.len()
    }

    /// Whether the score at the list boundary was tied.
    pub fn tie_flag(&self) -> bool {
        self.tie_flag
    }

    pub fn contains(&self, m: usize) -> bool {
        self.members.binary_search(&m).is_ok()
    }
}

/// Lists the `L` highest-scoring messages.
///
/// Under [`TiePolicy::LowestIndex`] the result has exactly `L` members with
/// boundary ties broken toward smaller index; under
/// [`TiePolicy::RejectTies`] every message in the boundary-tied score group
/// is excluded. Either way, every out-of-list score is at most every
/// in-list score.
pub fn list_decode_top_l(scores: &ScoreVector, l: usize, policy: TiePolicy) -> Result<DecodeList> {
    let m = scores.len();
    if l == 0 || l > m {
        return Err(Error::InvalidParameter(format!(
            "list size {l} out of range [1, {m}]"
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_unstable_by(|&a, &b| {
        scores
            .get(b)
            .partial_cmp(&scores.get(a))
            .expect("scores are never NaN")
            .then(a.cmp(&b))
    });
    let boundary_tied = l < m && scores.get(order[l - 1]) == scores.get(order[l]);
    let mut members: Vec<usize> = match policy {
        TiePolicy::LowestIndex => order[..l].to_vec(),
        TiePolicy::RejectTies if boundary_tied => {
            let boundary = scores.get(order[l - 1]);
            order
                .iter()
                .copied()
                .filter(|&i| scores.get(i) > boundary)
                .collect()
        }
        TiePolicy::RejectTies => order[..l].to_vec(),
    };
    members.sort_unstable();
    Ok(DecodeList {
        members,
        tie_flag: boundary_tied,
    })
}

/// Lists every message whose score reaches the threshold `tau` (the
/// superlevel set); the list size is data dependent.
pub fn list_decode_threshold(scores: &ScoreVector, tau: f64) -> DecodeList {
    let members = (0..scores.len())
        .filter(|&i| scores.get(i) >= tau)
        .collect();
    DecodeList {
        members,
        tie_flag: false,
    }
}

/// Outcome of ordinary (list size one) decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicDecision {
    Message(usize),
    /// The maximizer was not unique; an error is declared.
    Tie,
}

/// Ordinary decoding: unique argmax, or a declared error on ties.
pub fn classic_decode(scores: &ScoreVector) -> ClassicDecision {
    let mut best = 0usize;
    let mut tied = false;
    for i in 1..scores.len() {
        if scores.get(i) > scores.get(best) {
            best = i;
            tied = false;
        } else if scores.get(i) == scores.get(best) {
            tied = true;
        }
    }
    if tied {
        ClassicDecision::Tie
    } else {
        ClassicDecision::Message(best)
    }
}

/// Fraction of messages scoring at least as high as the transmitted one
/// (duplicates counted; the transmitted message always counts itself), in
/// `[1/M, 1]`.
pub fn phi_count(scores: &ScoreVector, transmitted: usize) -> Result<f64> {
    if transmitted >= scores.len() {
        return Err(Error::InvalidParameter(format!(
            "transmitted index {transmitted} out of range for {} messages",
            scores.len()
        )));
    }
    let count = scores.count_at_least(scores.get(transmitted));
    Ok(count as f64 / scores.len() as f64)
}
