//! Codebook constructions and ratio-function arithmetic.
//!
//! A [`Codebook`] is an ordered list of `M` length-`n` blocks; duplicate
//! codewords are legal everywhere (the replication construction depends on
//! them) and counting operations treat duplicates as distinct codewords.
//!
//! A [`RatioFunction`] maps `(M, n)` to the codebook-to-list-size ratio
//! `r(M, n)`, always clamped into `[1, M]`; the permitted list size is the
//! integer `L = floor(M / r)` clamped into `[1, M]`. Logarithms here are
//! natural logs throughout, including the iterated-log kind.

use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{Block, Symbol};
use crate::information::Distribution;
use crate::rng::Stream;
use crate::{Error, Result};

/// Cap on the number of codewords a replicated codebook may hold.
pub const MAX_REPLICATED_CODEWORDS: u64 = 1 << 26;

/// An ordered codebook of `M` length-`n` codewords.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    codewords: Vec<Block>,
    provenance: String,
}

impl Codebook {
    pub fn new(n: usize, codewords: Vec<Block>, provenance: impl Into<String>) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::InvalidParameter(
                "codebook needs at least one codeword".into(),
            ));
        }
        for cw in &codewords {
            if cw.len() != n {
                return Err(Error::LengthMismatch {
                    got: cw.len(),
                    expected: n,
                });
            }
        }
        Ok(Codebook {
            n,
            codewords,
            provenance: provenance.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of messages `M`.
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codeword(&self, m: usize) -> &Block {
        &self.codewords[m]
    }

    pub fn codewords(&self) -> &[Block] {
        &self.codewords
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn set_provenance(&mut self, provenance: impl Into<String>) {
        self.provenance = provenance.into();
    }

    /// Largest symbol index used anywhere in the codebook.
    pub fn max_symbol(&self) -> Symbol {
        self.codewords
            .iter()
            .flat_map(|cw| cw.symbols().iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Checks every codeword against an input alphabet size.
    pub fn validate_alphabet(&self, alphabet: usize) -> Result<()> {
        for cw in &self.codewords {
            cw.validate_alphabet(alphabet)?;
        }
        Ok(())
    }

    /// Parses the codebook text format:
    ///
    /// ```text
    /// n M
    /// row of n symbol indices        (repeated M times)
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut codewords: Vec<Block> = Vec::new();
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
                            message: "expected header \"n M\"".into(),
                        });
                    }
                    let n: usize = fields[0].parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        message: format!("invalid n {:?}", fields[0]),
                    })?;
                    let m: usize = fields[1].parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        message: format!("invalid M {:?}", fields[1]),
                    })?;
                    header = Some((n, m));
                }
                Some((n, m)) => {
                    if codewords.len() == m {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            message: format!("expected exactly {m} codewords"),
                        });
                    }
                    if fields.len() != n {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            message: format!("expected {n} symbols, found {}", fields.len()),
                        });
                    }
                    let symbols = fields
                        .iter()
                        .map(|f| {
                            f.parse::<Symbol>().map_err(|_| Error::Parse {
                                line: lineno + 1,
                                message: format!("invalid symbol {f:?}"),
                            })
                        })
                        .collect::<Result<Vec<Symbol>>>()?;
                    codewords.push(Block::new(symbols));
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        if codewords.len() != m {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected {m} codewords, found {}", codewords.len()),
            });
        }
        Codebook::new(n, codewords, "file")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let mut cb = Codebook::parse(&std::fs::read_to_string(path.as_ref())?)?;
        cb.set_provenance(format!("file:{}", path.as_ref().display()));
        Ok(cb)
    }

    /// Serializes in the text format accepted by [`Codebook::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.codewords.len());
        for cw in &self.codewords {
            let fields: Vec<String> = cw.symbols().iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "{}", fields.join(" "));
        }
        out
    }
}

/// Ratio-function kinds `r(M, n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioFunction {
    /// `r = M`, i.e. ordinary decoding with `L = 1`.
    Full,
    /// Fixed permitted list size: `r = M / L`.
    ConstantList { list_size: u64 },
    /// `r = M e^{-n theta}`, i.e. `L = e^{n theta}`; `theta` in nats/use.
    Exponent { theta_nats: f64 },
    /// `r = ln M`.
    IteratedLog,
    /// `r = M^alpha`, i.e. `L = M^(1-alpha)`, `alpha` in `[0, 1]`.
    Power { alpha: f64 },
}

/// Result of evaluating a ratio function at `(M, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEval {
    /// Ratio clamped into `[1, M]`.
    pub ratio: f64,
    /// Permitted list size `floor(M / ratio)` clamped into `[1, M]`.
    pub list_size: u64,
    /// Whether any clamping fired.
    pub clamped: bool,
}

/// Snaps a float to the nearest integer when within 1e-9 relative, guarding
/// floor/ceil against one-ulp drift in exp/pow.
pub(crate) fn snap_to_integer(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

impl RatioFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            RatioFunction::ConstantList { list_size } if *list_size == 0 => Err(
                Error::InvalidParameter("constant list size must be at least 1".into()),
            ),
            RatioFunction::Exponent { theta_nats } if !(theta_nats.is_finite() && *theta_nats >= 0.0) => {
                Err(Error::InvalidParameter(format!(
                    "list-size exponent must be nonnegative, got {theta_nats}"
                )))
            }
            RatioFunction::Power { alpha } if !(0.0..=1.0).contains(alpha) => {
                Err(Error::InvalidParameter(format!(
                    "power exponent must lie in [0, 1], got {alpha}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Evaluates `r(M, n)` and the permitted list size.
    pub fn evaluate(&self, m: u64, n: usize) -> RatioEval {
        assert!(m >= 1 && n >= 1, "ratio functions need M >= 1, n >= 1");
        let mf = m as f64;
        let (raw_ratio, direct_list): (f64, Option<f64>) = match self {
            RatioFunction::Full => (mf, Some(1.0)),
            RatioFunction::ConstantList { list_size } => {
                let l = (*list_size).min(m).max(1) as f64;
                (mf / l, Some(l))
            }
            RatioFunction::Exponent { theta_nats } => (
                mf * (-(n as f64) * theta_nats).exp(),
                Some(snap_to_integer((n as f64 * theta_nats).exp()).floor()),
            ),
            RatioFunction::IteratedLog => (mf.ln(), None),
            RatioFunction::Power { alpha } => (
                mf.powf(*alpha),
                Some(snap_to_integer(mf.powf(1.0 - alpha)).floor()),
            ),
        };
        let ratio = raw_ratio.clamp(1.0, mf);
        let list_raw = match direct_list {
            Some(l) => l,
            None => snap_to_integer(mf / ratio).floor(),
        };
        let list_size = (list_raw.max(1.0).min(mf)) as u64;
        let clamped = raw_ratio < 1.0
            || raw_ratio > mf
            || list_raw < 1.0
            || list_raw > mf
            || matches!(self, RatioFunction::ConstantList { list_size } if *list_size > m);
        RatioEval {
            ratio,
            list_size,
            clamped,
        }
    }

    /// `ln r(M, n)` computed from the kind's closed form and clamped into
    /// `[0, ln M]`. Comparisons between the rank statistic
    /// `(ln M - ln count)/n` and `ln r / n` rely on both sides being built
    /// from the same `ln M`/`ln L` subtractions, so integral boundaries
    /// resolve as exact ties.
    pub fn log_ratio_nats(&self, m: u64, n: usize) -> f64 {
        assert!(m >= 1 && n >= 1);
        let ln_m = (m as f64).ln();
        let raw = match self {
            RatioFunction::Full => ln_m,
            RatioFunction::ConstantList { list_size } => {
                let l = (*list_size).min(m).max(1);
                ln_m - (l as f64).ln()
            }
            RatioFunction::Exponent { theta_nats } => ln_m - n as f64 * theta_nats,
            RatioFunction::IteratedLog => ln_m.ln(),
            RatioFunction::Power { alpha } => alpha * ln_m,
        };
        raw.clamp(0.0, ln_m)
    }

    /// Short stable name for reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            RatioFunction::Full => "full",
            RatioFunction::ConstantList { .. } => "constant_list",
            RatioFunction::Exponent { .. } => "exponent",
            RatioFunction::IteratedLog => "iterated_log",
            RatioFunction::Power { .. } => "power",
        }
    }
}

/// Draws `m` independent length-`n` codewords with i.i.d. letters from `px`.
///
/// Deterministic given the stream; the same stream state always yields the
/// same codebook.
pub fn random_codebook(
    n: usize,
    m: u64,
    px: &Distribution,
    stream: &mut Stream,
) -> Result<Codebook> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(
            "random codebook needs n >= 1 and M >= 1".into(),
        ));
    }
    if m > MAX_REPLICATED_CODEWORDS {
        return Err(Error::ReplicationOverflow {
            required: m as u128,
            cap: MAX_REPLICATED_CODEWORDS,
        });
    }
    let codewords = (0..m)
        .map(|_| Block::new((0..n).map(|_| px.sample(stream) as Symbol).collect()))
        .collect();
    Codebook::new(n, codewords, format!("random_iid(n={n}, M={m})"))
}

/// Builds the blown-up codebook holding `copies` identical copies of each
/// base codeword: message `m'` of the result maps to base codeword
/// `floor(m' / copies)`, so base codeword `A` occupies indices
/// `A*copies .. (A+1)*copies`.
pub fn replicate_codebook(base: &Codebook, copies: u64) -> Result<Codebook> {
    if copies == 0 {
        return Err(Error::InvalidParameter("copies must be at least 1".into()));
    }
    let required = base.len() as u128 * copies as u128;
    if required > MAX_REPLICATED_CODEWORDS as u128 {
        return Err(Error::ReplicationOverflow {
            required,
            cap: MAX_REPLICATED_CODEWORDS,
        });
    }
    let mut codewords = Vec::with_capacity(required as usize);
    for cw in base.codewords() {
        for _ in 0..copies {
            codewords.push(cw.clone());
        }
    }
    Codebook::new(
        base.n(),
        codewords,
        format!("replicate(base=[{}], copies={copies})", base.provenance()),
    )
}

/// Message-count exponent for the `L = M^(1-1/n)` regime: solving
/// `(1/n) log(M / M^(1-1/n)) = C` gives `log2 M = n^2 C`, returned in bits.
pub fn example1_message_count(n: usize, capacity_bits: f64) -> f64 {
    let nf = n as f64;
    nf * nf * capacity_bits
}

/// `ceil(2^(n R))` messages for a rate of `R` bits per use, with integer
/// snapping so that exactly-representable powers of two do not overshoot.
pub fn message_count_for_rate(n: usize, rate_bits: f64) -> u64 {
    snap_to_integer((n as f64 * rate_bits).exp2()).ceil().max(1.0) as u64
}

/// `ceil(2^(n Theta))` permitted list entries for a list exponent of
/// `Theta` bits per use, snapped the same way.
pub fn list_size_for_theta(n: usize, theta_bits: f64) -> u64 {
    snap_to_integer((n as f64 * theta_bits).exp2()).ceil().max(1.0) as u64
}
