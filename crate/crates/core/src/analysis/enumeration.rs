//! Exact probabilities by exhaustive enumeration.
//!
//! Every function here walks all `|Y|^n` output blocks, weighting by
//! `W^n(y | x_m)` in linear domain (products of at most a few dozen letter
//! probabilities, so no underflow at enumerable sizes) and averaging over
//! the uniform message. Zero-weight `(m, y)` pairs are skipped, which keeps
//! degenerate instances exact.

use std::collections::HashMap;

use crate::channel::{Channel, Symbol};
use crate::codes::{replicate_codebook, Codebook, RatioFunction};
use crate::decoding::{list_decode_threshold, list_decode_top_l, Metric, ScoreVector};
use crate::{Error, Result};

use super::{DecodeRule, DecoderSpec, EnumerationLimits, ErrorEstimate, EstimateMode};

/// Advances `y` to the next output block; returns false after the last one.
pub(crate) fn next_output(y: &mut [Symbol], ny: usize) -> bool {
    for slot in y.iter_mut().rev() {
        *slot += 1;
        if (*slot as usize) < ny {
            return true;
        }
        *slot = 0;
    }
    false
}

pub(crate) fn check_enumeration(
    ch: &Channel,
    n: usize,
    limits: &EnumerationLimits,
) -> Result<()> {
    let required = (ch.output_size() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if required > limits.max_outputs as u128 {
        return Err(Error::EnumerationCapExceeded {
            required,
            cap: limits.max_outputs,
        });
    }
    Ok(())
}

fn validate_instance(ch: &Channel, cb: &Codebook, metric: &Metric) -> Result<()> {
    cb.validate_alphabet(ch.input_size())?;
    metric.validate_alphabets(ch.input_size(), ch.output_size())
}

/// Shared enumeration pass: for every output block `y`, hands the visitor
/// the per-message scores, a sorted copy, and the per-message linear
/// weights `W^n(y|x_m)`.
fn for_each_output<F>(ch: &Channel, cb: &Codebook, metric: &Metric, mut visit: F)
where
    F: FnMut(&[Symbol], &[f64], &[f64], &[f64]),
{
    let n = cb.n();
    let m = cb.len();
    let mut y = vec![0 as Symbol; n];
    let mut scores = vec![0.0; m];
    let mut sorted = vec![0.0; m];
    let mut weights = vec![0.0; m];
    loop {
        for (i, cw) in cb.codewords().iter().enumerate() {
            scores[i] = metric.score_symbols(cw.symbols(), &y);
            weights[i] = ch.block_probability_symbols(cw.symbols(), &y);
        }
        sorted.copy_from_slice(&scores);
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("scores are never NaN"));
        visit(&y, &scores, &sorted, &weights);
        if !next_output(&mut y, ch.output_size()) {
            break;
        }
    }
}

/// Number of messages scoring at least `s`, from the ascending sorted copy.
#[inline]
fn count_at_least_sorted(sorted: &[f64], s: f64) -> usize {
    sorted.len() - sorted.partition_point(|&v| v < s)
}

/// Exact probability that more than `list_size` codewords score at least
/// as high as the transmitted one (duplicates counted), under a uniform
/// message and exhaustive output enumeration.
pub fn exact_counting_error(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    list_size: u64,
    limits: &EnumerationLimits,
) -> Result<f64> {
    validate_instance(ch, cb, metric)?;
    check_enumeration(ch, cb.n(), limits)?;
    let m = cb.len() as u64;
    if list_size == 0 || list_size > m {
        return Err(Error::InvalidParameter(format!(
            "list size {list_size} out of range [1, {m}]"
        )));
    }
    let threshold = list_size as usize;
    let mut acc = 0.0;
    for_each_output(ch, cb, metric, |_, scores, sorted, weights| {
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 && count_at_least_sorted(sorted, scores[i]) > threshold {
                acc += w;
            }
        }
    });
    Ok(acc / cb.len() as f64)
}

/// Exact probability that the normalized rank statistic `-(1/n) ln Phi`
/// falls below the normalized log-ratio `(1/n) ln r(M, n)`.
///
/// Both sides are evaluated as `(ln M - ln k)/n`, so when `M/r` is an
/// integer the boundary `count == M/r` resolves as an exact tie and the
/// result agrees with [`exact_counting_error`] at `L = floor(M/r)` to
/// machine precision.
pub fn exact_error_via_phi(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    ratio: &RatioFunction,
    limits: &EnumerationLimits,
) -> Result<f64> {
    validate_instance(ch, cb, metric)?;
    check_enumeration(ch, cb.n(), limits)?;
    ratio.validate()?;
    let m = cb.len() as u64;
    let n = cb.n() as f64;
    let ln_m = (cb.len() as f64).ln();
    let threshold = ratio.log_ratio_nats(m, cb.n()) / n;
    let mut acc = 0.0;
    for_each_output(ch, cb, metric, |_, scores, sorted, weights| {
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let count = count_at_least_sorted(sorted, scores[i]);
            let statistic = (ln_m - (count as f64).ln()) / n;
            if statistic < threshold {
                acc += w;
            }
        }
    });
    Ok(acc / cb.len() as f64)
}

/// Exact error probabilities plus the expected list size of a decoder.
#[derive(Debug, Clone)]
pub struct ExactDecoderReport {
    pub estimate: ErrorEstimate,
    /// `E |L(Y)|` under the code-induced output distribution.
    pub expected_list_size: f64,
    /// Probability that the first-kind or the second-kind event occurs;
    /// dominates the counting probability for threshold decoders.
    pub p_first_or_second: f64,
}

/// Exact first-kind, second-kind, and counting error probabilities of the
/// given decoder by exhaustive enumeration.
pub fn exact_decoder_error(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    decoder: &DecoderSpec,
    limits: &EnumerationLimits,
) -> Result<ExactDecoderReport> {
    validate_instance(ch, cb, metric)?;
    check_enumeration(ch, cb.n(), limits)?;
    let m = cb.len() as u64;
    if decoder.permitted_list == 0 || decoder.permitted_list > m {
        return Err(Error::InvalidParameter(format!(
            "permitted list size {} out of range [1, {m}]",
            decoder.permitted_list
        )));
    }
    let permitted = decoder.permitted_list as usize;
    let mf = cb.len() as f64;
    let (mut eps, mut zeta, mut counting, mut union, mut expected_list) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    for_each_output(ch, cb, metric, |_, scores, sorted, weights| {
        let sv = ScoreVector::new(scores.to_vec());
        let list = match decoder.rule {
            DecodeRule::TopL { tie_policy } => {
                list_decode_top_l(&sv, permitted, tie_policy).expect("validated list size")
            }
            DecodeRule::Threshold { tau } => list_decode_threshold(&sv, tau),
        };
        let p_y: f64 = weights.iter().sum::<f64>() / mf;
        expected_list += p_y * list.list_size() as f64;
        let oversize = list.list_size() > permitted;
        if oversize {
            zeta += p_y;
            union += p_y;
        }
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            if !list.contains(i) {
                eps += w / mf;
                if !oversize {
                    union += w / mf;
                }
            }
            if count_at_least_sorted(sorted, scores[i]) > permitted {
                counting += w / mf;
            }
        }
    });
    Ok(ExactDecoderReport {
        estimate: ErrorEstimate {
            eps_first_kind: eps,
            zeta_second_kind: zeta,
            p_er_counting: counting,
            trials: 0,
            eps_std_err: 0.0,
            zeta_std_err: 0.0,
            counting_std_err: 0.0,
            seed: None,
            mode: EstimateMode::Exact,
        },
        expected_list_size: expected_list,
        p_first_or_second: union,
    })
}

/// Exact `E[-(1/n) ln Phi]` in nats per use under a uniform message, with
/// the accumulated weight normalized out so that degenerate instances (for
/// example a noiseless channel with a duplicate-free codebook, where the
/// statistic is constant) reproduce that constant exactly.
pub fn expected_phi_log_exact(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    limits: &EnumerationLimits,
) -> Result<f64> {
    validate_instance(ch, cb, metric)?;
    check_enumeration(ch, cb.n(), limits)?;
    let n = cb.n() as f64;
    let ln_m = (cb.len() as f64).ln();
    let mut acc = 0.0;
    let mut mass = 0.0;
    for_each_output(ch, cb, metric, |_, scores, sorted, weights| {
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let count = count_at_least_sorted(sorted, scores[i]);
            acc += w * ((ln_m - (count as f64).ln()) / n);
            mass += w;
        }
    });
    Ok(acc / mass)
}

/// Exact block mutual information `I(X^n; Y^n)` in nats for the input
/// distribution induced by the codebook (uniform over the codeword
/// multiset, duplicates merging into heavier atoms).
pub fn code_mutual_information(
    ch: &Channel,
    cb: &Codebook,
    limits: &EnumerationLimits,
) -> Result<f64> {
    cb.validate_alphabet(ch.input_size())?;
    check_enumeration(ch, cb.n(), limits)?;
    let mut multiplicity: HashMap<&[Symbol], usize> = HashMap::new();
    for cw in cb.codewords() {
        *multiplicity.entry(cw.symbols()).or_insert(0) += 1;
    }
    let distinct: Vec<(&[Symbol], f64)> = multiplicity
        .into_iter()
        .map(|(s, c)| (s, c as f64 / cb.len() as f64))
        .collect();
    let mut y = vec![0 as Symbol; cb.n()];
    let mut nats = 0.0;
    loop {
        let mut p_y = 0.0;
        let mut w_cache = Vec::with_capacity(distinct.len());
        for &(x, px) in &distinct {
            let w = ch.block_probability_symbols(x, &y);
            w_cache.push(w);
            p_y += px * w;
        }
        if p_y > 0.0 {
            for (&(_, px), &w) in distinct.iter().zip(&w_cache) {
                if px > 0.0 && w > 0.0 {
                    nats += px * w * (w / p_y).ln();
                }
            }
        }
        if !next_output(&mut y, ch.output_size()) {
            break;
        }
    }
    Ok(nats)
}

/// Exact pair for the replication construction: the counting error of the
/// base code at `list_size` and of the blown-up code (each codeword
/// repeated `copies` times) at `copies * list_size`. The construction makes
/// the second at most the first.
pub fn replication_monotonicity_check(
    ch: &Channel,
    base: &Codebook,
    metric: &Metric,
    copies: u64,
    list_size: u64,
    limits: &EnumerationLimits,
) -> Result<(f64, f64)> {
    let p_base = exact_counting_error(ch, base, metric, list_size, limits)?;
    let replicated = replicate_codebook(base, copies)?;
    let p_replicated =
        exact_counting_error(ch, &replicated, metric, copies * list_size, limits)?;
    Ok((p_base, p_replicated))
}

/// Both sides of the output-spectrum inequality for a threshold decoder.
#[derive(Debug, Clone)]
pub struct SpectrumInequalityCheck {
    /// `Pr{ (1/n) ln [P(S|Y)/P(S)] <= (1/n) ln r - gamma }`, enumerated.
    pub lhs: f64,
    /// `eps_n + e^{-n gamma} * E|L(Y)| / L`, enumerated.
    pub rhs: f64,
    pub eps_first_kind: f64,
    pub expected_list_size: f64,
    pub permitted_list: u64,
}

/// Enumerates the information-density tail event and its decoder-side upper
/// bound for the threshold decoder at `tau` with slack `gamma` (nats/use).
pub fn spectrum_inequality_check(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    tau: f64,
    ratio: &RatioFunction,
    gamma: f64,
    limits: &EnumerationLimits,
) -> Result<SpectrumInequalityCheck> {
    validate_instance(ch, cb, metric)?;
    check_enumeration(ch, cb.n(), limits)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spectrum slack must be positive, got {gamma}"
        )));
    }
    ratio.validate()?;
    let m = cb.len() as u64;
    let n = cb.n() as f64;
    let permitted = ratio.evaluate(m, cb.n()).list_size;
    let threshold = ratio.log_ratio_nats(m, cb.n()) / n - gamma;
    let mf = cb.len() as f64;
    let (mut lhs, mut eps, mut expected_list) = (0.0, 0.0, 0.0);
    for_each_output(ch, cb, metric, |_, scores, _, weights| {
        let p_y: f64 = weights.iter().sum::<f64>() / mf;
        if p_y == 0.0 {
            return;
        }
        let list_size = scores.iter().filter(|&&s| s >= tau).count();
        expected_list += p_y * list_size as f64;
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            // info density (1/n) ln [ W^n(y|x_S) / P(y) ]
            let statistic = (w / p_y).ln() / n;
            if statistic <= threshold {
                lhs += w / mf;
            }
            if scores[i] < tau {
                eps += w / mf;
            }
        }
    });
    let rhs = eps + (-(n * gamma)).exp() * expected_list / permitted as f64;
    Ok(SpectrumInequalityCheck {
        lhs,
        rhs,
        eps_first_kind: eps,
        expected_list_size: expected_list,
        permitted_list: permitted,
    })
}
