//! Random-coding score tails.
//!
//! `phi_random_coding` computes `Pr{ q_n(X~, y) >= q_n(x, y) }` where the
//! competitor `X~` has i.i.d. letters from a given input distribution. For
//! additive metrics this is done by convolving the per-position letter-score
//! distributions and reading off an exact upper tail.
//!
//! Score values are kept exact wherever the table allows it: integer-valued
//! tables (Hamming, erasures-only in its 0/1 form) are used as-is, and
//! tables whose entries share a small common denominator are scaled to
//! integers first, so sums and the tail comparison involve no rounding.
//! Otherwise sums are accumulated left to right in f64, the same fold
//! [`Metric::score`] uses, so the tail target is bitwise identical to the
//! matching convolution point and ties resolve consistently with the Monte
//! Carlo path. An explicit quantization step can be configured instead,
//! which rounds every letter score to a multiple of the step.

use crate::channel::{Block, Symbol, LOG_ZERO};
use crate::information::Distribution;
use crate::rng::Stream;
use crate::stats::wilson_half_width;
use crate::{Error, Result};

use super::Metric;

/// Options for the exact tail computation.
#[derive(Debug, Clone)]
pub struct PhiOptions {
    /// Round per-letter scores to multiples of this step instead of the
    /// automatic exact handling.
    pub quantization_step: Option<f64>,
    /// Cap on the common denominator searched for rational score tables.
    pub max_denominator: u64,
    /// Cap on the number of distinct block-score support points.
    pub max_support: usize,
}

impl Default for PhiOptions {
    fn default() -> Self {
        PhiOptions {
            quantization_step: None,
            max_denominator: 1_000_000,
            max_support: 1 << 20,
        }
    }
}

/// A Monte Carlo (or exact) estimate of the tail probability.
#[derive(Debug, Clone, Copy)]
pub struct PhiEstimate {
    pub value: f64,
    /// Wilson half-width at one sigma; zero for exact values.
    pub std_err: f64,
    pub exact: bool,
}

/// Per-position distribution of one letter score.
#[derive(Debug, Clone)]
pub(crate) struct LetterDist {
    /// Finite score values with their weights (weights need not sum to 1).
    pub finite: Vec<(f64, f64)>,
    /// Weight on the log-zero sentinel.
    pub neg_mass: f64,
}

/// Builds the letter-score distribution at output symbol `y` when the input
/// letter carries the given per-symbol weights.
pub(crate) fn letter_dist(metric: &Metric, y: Symbol, weights: &[f64]) -> LetterDist {
    let mut finite = Vec::new();
    let mut neg_mass = 0.0;
    for (x, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = metric.letter_score(x as Symbol, y);
        if v == LOG_ZERO {
            neg_mass += w;
        } else {
            finite.push((v, w));
        }
    }
    LetterDist { finite, neg_mass }
}

/// Distribution of a block score: finite support points (sorted ascending,
/// merged on exact equality) plus mass on the log-zero sentinel.
#[derive(Debug, Clone)]
pub(crate) struct ScoreDist {
    points: Vec<(f64, f64)>,
    neg_inf_mass: f64,
}

impl ScoreDist {
    /// Convolves the given per-position letter distributions.
    pub(crate) fn convolve(letters: &[LetterDist], max_support: usize) -> Result<Self> {
        let mut points: Vec<(f64, f64)> = vec![(0.0, 1.0)];
        let mut neg_inf_mass = 0.0;
        for letter in letters {
            let letter_total: f64 =
                letter.finite.iter().map(|&(_, w)| w).sum::<f64>() + letter.neg_mass;
            let finite_total: f64 = points.iter().map(|&(_, p)| p).sum();
            // Once a block hits the sentinel it stays there.
            neg_inf_mass = neg_inf_mass * letter_total + finite_total * letter.neg_mass;
            let mut next = Vec::with_capacity(points.len() * letter.finite.len().max(1));
            for &(s, p) in &points {
                for &(v, w) in &letter.finite {
                    next.push((s + v, p * w));
                }
            }
            next.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite scores"));
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(next.len());
            for (s, p) in next {
                match merged.last_mut() {
                    Some(last) if last.0 == s => last.1 += p,
                    _ => merged.push((s, p)),
                }
            }
            if merged.len() > max_support {
                return Err(Error::ExactPathInfeasible(format!(
                    "score support grew to {} points, cap is {max_support}",
                    merged.len()
                )));
            }
            points = merged;
        }
        Ok(ScoreDist {
            points,
            neg_inf_mass,
        })
    }

    /// `Pr{ S >= t }`; a sentinel target means every block qualifies.
    pub(crate) fn tail_at_least(&self, t: f64) -> f64 {
        if t == LOG_ZERO {
            return self.total_mass();
        }
        self.points
            .iter()
            .rev()
            .take_while(|&&(s, _)| s >= t)
            .map(|&(_, p)| p)
            .sum()
    }

    pub(crate) fn total_mass(&self) -> f64 {
        self.points.iter().map(|&(_, p)| p).sum::<f64>() + self.neg_inf_mass
    }

    /// Finite support points (score ascending).
    pub(crate) fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub(crate) fn neg_inf_mass(&self) -> f64 {
        self.neg_inf_mass
    }
}

/// Finds a scale turning every finite value into an integer: 1 if they all
/// already are, otherwise the least common denominator up to the cap found
/// by continued-fraction approximation. Values that are merely near a
/// rational (within 1e-9 relative) count as that rational.
pub(crate) fn common_scale(values: &[f64], max_denominator: u64) -> Option<f64> {
    let near = |v: f64, target: f64| (v - target).abs() <= 1e-9 * target.abs().max(1.0);
    if values.iter().all(|&v| near(v, v.round())) {
        return Some(1.0);
    }
    let mut lcm: u64 = 1;
    for &v in values {
        let den = rational_denominator(v, max_denominator)?;
        lcm = lcm / gcd(lcm, den) * den;
        if lcm > max_denominator {
            return None;
        }
    }
    let scale = lcm as f64;
    if values.iter().all(|&v| near(v * scale, (v * scale).round())) {
        Some(scale)
    } else {
        None
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest denominator `q <= limit` with `|v - p/q|` within 1e-9 relative,
/// via the continued-fraction convergents of `v`.
fn rational_denominator(v: f64, limit: u64) -> Option<u64> {
    let target = v.abs();
    let (mut h0, mut h1) = (1i128, target.floor() as i128);
    let (mut k0, mut k1) = (0i128, 1i128);
    let mut frac = target - target.floor();
    for _ in 0..64 {
        if k1 > 0 && k1 as u64 <= limit {
            let approx = h1 as f64 / k1 as f64;
            if (target - approx).abs() <= 1e-9 * target.max(1.0) {
                return Some(k1 as u64);
            }
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i128;
        (h0, h1) = (h1, a * h1 + h0);
        (k0, k1) = (k1, a * k1 + k0);
        if k1 as u64 > limit {
            return None;
        }
    }
    None
}

fn validate_phi_inputs(
    metric: &Metric,
    px: &Distribution,
    x: &Block,
    y: &Block,
) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            got: y.len(),
            expected: x.len(),
        });
    }
    x.validate_alphabet(px.len())?;
    let max_out = y.symbols().iter().map(|&s| s as usize + 1).max().unwrap_or(1);
    metric.validate_alphabets(px.len(), max_out)
}

/// Exact tail probability `Pr{ q_n(X~, y) >= q_n(x, y) }` with `X~` drawn
/// i.i.d. from `px`, using default [`PhiOptions`].
pub fn phi_random_coding(metric: &Metric, px: &Distribution, x: &Block, y: &Block) -> Result<f64> {
    phi_random_coding_with(metric, px, x, y, &PhiOptions::default())
}

/// Exact tail probability with explicit options.
pub fn phi_random_coding_with(
    metric: &Metric,
    px: &Distribution,
    x: &Block,
    y: &Block,
    options: &PhiOptions,
) -> Result<f64> {
    validate_phi_inputs(metric, px, x, y)?;
    if let Metric::ErasuresOnly(ch) = metric {
        // Indicator metric: the target is 0 or 1. A zero target makes the
        // event certain; otherwise the competitor must stay inside the
        // channel support at every letter.
        if metric.score_unchecked(x, y) == 0.0 {
            return Ok(1.0);
        }
        let mut phi = 1.0;
        for &yi in y.symbols() {
            let mut letter = 0.0;
            for xp in 0..px.len() {
                if ch.transition(xp as Symbol, yi) > 0.0 {
                    letter += px.prob(xp);
                }
            }
            phi *= letter;
        }
        return Ok(phi.clamp(0.0, 1.0));
    }

    let target = metric.score_unchecked(x, y);
    if target == LOG_ZERO {
        return Ok(1.0);
    }
    let mut letters: Vec<LetterDist> = y
        .symbols()
        .iter()
        .map(|&yi| letter_dist(metric, yi, px.probs()))
        .collect();

    let scale = match options.quantization_step {
        Some(step) => {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "quantization step must be positive and finite, got {step}"
                )));
            }
            1.0 / step
        }
        None => {
            let mut values: Vec<f64> = letters
                .iter()
                .flat_map(|l| l.finite.iter().map(|&(v, _)| v))
                .collect();
            values.extend(
                x.symbols()
                    .iter()
                    .zip(y.symbols())
                    .map(|(&xi, &yi)| metric.letter_score(xi, yi)),
            );
            common_scale(&values, options.max_denominator).unwrap_or(1.0)
        }
    };
    let quantize = options.quantization_step.is_some() || scale != 1.0;
    let target = if quantize {
        // Integer-valued scaled scores sum exactly in f64, so the per-letter
        // rounding below is the only place precision is spent.
        let mut t = 0.0;
        for (&xi, &yi) in x.symbols().iter().zip(y.symbols()) {
            t += (metric.letter_score(xi, yi) * scale).round();
        }
        t
    } else {
        target
    };
    if quantize {
        for letter in &mut letters {
            for point in &mut letter.finite {
                point.0 = (point.0 * scale).round();
            }
        }
    }
    let dist = ScoreDist::convolve(&letters, options.max_support)?;
    Ok(dist.tail_at_least(target).clamp(0.0, 1.0))
}

/// Monte Carlo fallback: draws `trials` independent competitors and counts
/// how many score at least the target.
pub fn phi_random_coding_mc(
    metric: &Metric,
    px: &Distribution,
    x: &Block,
    y: &Block,
    trials: u64,
    stream: &mut Stream,
) -> Result<PhiEstimate> {
    validate_phi_inputs(metric, px, x, y)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let target = metric.score_unchecked(x, y);
    let n = x.len();
    let mut hits = 0u64;
    let mut competitor = vec![0 as Symbol; n];
    for _ in 0..trials {
        for slot in competitor.iter_mut() {
            *slot = px.sample(stream) as Symbol;
        }
        if metric.score_symbols(&competitor, y.symbols()) >= target {
            hits += 1;
        }
    }
    Ok(PhiEstimate {
        value: hits as f64 / trials as f64,
        std_err: wilson_half_width(hits, trials, 1.0),
        exact: false,
    })
}
