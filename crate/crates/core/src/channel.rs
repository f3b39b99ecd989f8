//! Finite discrete memoryless channels.
//!
//! A [`Channel`] is a stochastic matrix `W(y|x)` applied independently per
//! letter over a block. Probabilities are validated and stored in linear
//! domain; natural logs are cached with [`LOG_ZERO`] marking zero
//! transitions, so block-level work never re-derives logs and
//! support-sensitive metrics see exact zeros.
//!
//! Channels and blocks are immutable after construction and can be shared
//! freely across threads; sampling takes an explicit per-caller [`Stream`].

use std::fmt::Write as _;
use std::path::Path;

use crate::rng::Stream;
use crate::{Error, Result};

/// Symbol index into a finite alphabet.
pub type Symbol = u16;

/// Sentinel for `ln 0`: compares below every finite score and equal to
/// itself, which is exactly the ordering block scores need.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

/// Tolerance for row sums of a transition matrix.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// A sequence of symbol indices of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    symbols: Vec<Symbol>,
}

impl Block {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Block { symbols }
    }

    /// Convenience constructor from small nonnegative integers.
    pub fn from_usizes(symbols: &[usize]) -> Self {
        Block {
            symbols: symbols.iter().map(|&s| s as Symbol).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Checks every symbol index against an alphabet size.
    pub fn validate_alphabet(&self, alphabet: usize) -> Result<()> {
        for &s in &self.symbols {
            if s as usize >= alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol: s as usize,
                    alphabet,
                });
            }
        }
        Ok(())
    }
}

/// A discrete memoryless channel `W(y|x)` with cached natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input_size: usize,
    output_size: usize,
    transition: Vec<Vec<f64>>,
    log_transition: Vec<Vec<f64>>,
}

impl Channel {
    /// Validates a transition matrix and caches its logs.
    ///
    /// Rows are indexed by input symbol. Every entry must lie in `[0, 1]`
    /// and every row must sum to 1 within [`ROW_SUM_TOLERANCE`].
    pub fn from_rows(matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let output_size = matrix[0].len();
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != output_size {
                return Err(Error::RaggedMatrix {
                    row,
                    len: r.len(),
                    expected: output_size,
                });
            }
            let mut sum = 0.0;
            for &v in r {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidEntry { row, value: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::RowSumMismatch { row, sum });
            }
        }
        let log_transition = matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| if v > 0.0 { v.ln() } else { LOG_ZERO })
                    .collect()
            })
            .collect();
        Ok(Channel {
            input_size: matrix.len(),
            output_size,
            transition: matrix,
            log_transition,
        })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Channel::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Binary erasure channel with erasure probability `e`; outputs are
    /// `{0, 1, erasure}` with the erasure symbol indexed 2.
    pub fn bec(e: f64) -> Result<Self> {
        if !e.is_finite() || !(0.0..=1.0).contains(&e) {
            return Err(Error::ProbabilityOutOfRange(e));
        }
        Channel::from_rows(vec![vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]])
    }

    /// Noiseless k-ary channel (identity matrix).
    pub fn noiseless(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyMatrix);
        }
        let rows = (0..k)
            .map(|x| (0..k).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Channel::from_rows(rows)
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    /// `W(y|x)`.
    #[inline]
    pub fn transition(&self, x: Symbol, y: Symbol) -> f64 {
        self.transition[x as usize][y as usize]
    }

    /// `ln W(y|x)`, or [`LOG_ZERO`].
    #[inline]
    pub fn log_transition(&self, x: Symbol, y: Symbol) -> f64 {
        self.log_transition[x as usize][y as usize]
    }

    /// Transition row for input `x`.
    pub fn row(&self, x: usize) -> &[f64] {
        &self.transition[x]
    }

    /// Samples an output block for input `x`, one letter at a time.
    pub fn transmit(&self, x: &Block, stream: &mut Stream) -> Result<Block> {
        x.validate_alphabet(self.input_size)?;
        let symbols = x
            .symbols()
            .iter()
            .map(|&xi| stream.sample_categorical(&self.transition[xi as usize]) as Symbol)
            .collect();
        Ok(Block::new(symbols))
    }

    /// `sum_i ln W(y_i|x_i)` in nats; [`LOG_ZERO`] if any factor is zero.
    pub fn block_log_likelihood(&self, x: &Block, y: &Block) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                got: y.len(),
                expected: x.len(),
            });
        }
        x.validate_alphabet(self.input_size)?;
        y.validate_alphabet(self.output_size)?;
        let mut total = 0.0;
        for (&xi, &yi) in x.symbols().iter().zip(y.symbols()) {
            let l = self.log_transition(xi, yi);
            if l == LOG_ZERO {
                return Ok(LOG_ZERO);
            }
            total += l;
        }
        Ok(total)
    }

    /// Linear-domain `W^n(y|x)`; used by enumeration loops where products of
    /// a few dozen letter probabilities cannot underflow.
    pub(crate) fn block_probability(&self, x: &Block, y: &Block) -> f64 {
        self.block_probability_symbols(x.symbols(), y.symbols())
    }

    pub(crate) fn block_probability_symbols(&self, x: &[Symbol], y: &[Symbol]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| self.transition(xi, yi))
            .product()
    }

    /// Parses the channel text format:
    ///
    /// ```text
    /// # optional comment lines start with '#'
    /// |X| |Y|
    /// row of |Y| probabilities        (repeated |X| times)
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut header: Option<(usize, usize)> = None;
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
                    let nx = parse_usize(fields[0], lineno + 1)?;
                    let ny = parse_usize(fields[1], lineno + 1)?;
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
                        .map(|f| parse_f64(f, lineno + 1))
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
        Channel::from_rows(rows)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Channel::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes in the text format accepted by [`Channel::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.input_size, self.output_size);
        for row in &self.transition {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(out, "{}", fields.join(" "));
        }
        out
    }
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid integer {s:?}"),
    })
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number {s:?}"),
    })
}
