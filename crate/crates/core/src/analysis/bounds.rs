//! Converse floor and random-coding ceiling for the constant-list error
//! probability, plus the combined report the command line emits.

use crate::channel::{Channel, Symbol};
use crate::codes::{snap_to_integer, Codebook};
use crate::decoding::{common_scale, letter_dist, Metric, PhiOptions, ScoreDist};
use crate::information::{binary_divergence, converse_ratio_rhs, Distribution};
use crate::rng::Stream;
use crate::{Error, Result};

use super::enumeration::{
    check_enumeration, code_mutual_information, exact_decoder_error, expected_phi_log_exact,
    next_output,
};
use super::montecarlo::expected_phi_log_mc;
use super::{DecoderSpec, EnumerationLimits};

/// Floor on the constant-list error probability at rate `R` and list
/// exponent `Theta` (both nats/use): `1 - E[-(1/n) ln Phi] / (R - Theta)`,
/// with the expectation enumerated exactly. May be negative; the meaningful
/// floor is its positive part.
pub fn fano_lower_bound(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    rate_nats: f64,
    theta_nats: f64,
    limits: &EnumerationLimits,
) -> Result<f64> {
    check_rate_theta(rate_nats, theta_nats)?;
    let expectation = expected_phi_log_exact(ch, cb, metric, limits)?;
    Ok(1.0 - expectation / (rate_nats - theta_nats))
}

/// Monte Carlo variant of [`fano_lower_bound`]; returns the bound and the
/// standard error inherited from the sampled expectation.
pub fn fano_lower_bound_mc(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    rate_nats: f64,
    theta_nats: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    check_rate_theta(rate_nats, theta_nats)?;
    let (expectation, std_err) = expected_phi_log_mc(ch, cb, metric, trials, seed)?;
    let scale = rate_nats - theta_nats;
    Ok((1.0 - expectation / scale, std_err / scale))
}

fn check_rate_theta(rate_nats: f64, theta_nats: f64) -> Result<()> {
    if theta_nats.is_nan() || theta_nats < 0.0 || !rate_nats.is_finite() || rate_nats <= theta_nats {
        return Err(Error::InvalidParameter(format!(
            "need rate > theta >= 0 (nats/use), got rate={rate_nats}, theta={theta_nats}"
        )));
    }
    Ok(())
}

/// How the random-coding expectation over `(X, Y)` is taken.
#[derive(Debug, Clone, Copy)]
pub enum ExpectationMode {
    /// Exhaustive enumeration over output blocks (inputs are folded into
    /// per-letter posterior weights).
    Enumerate,
    /// Sample `(X, Y)` pairs; each trial computes its tail exactly.
    MonteCarlo { trials: u64, seed: u64 },
}

/// Random-coding ceiling value.
#[derive(Debug, Clone, Copy)]
pub struct RcBound {
    /// The bound, clamped into `[0, 1]`.
    pub value: f64,
    /// Set when rounding pushed the raw sum marginally above 1.
    pub clamped: bool,
    /// Expectation of the divergence-decay term over `{Phi < phi*}`.
    pub term_divergence: f64,
    /// Probability of `{Phi >= phi*}`.
    pub term_tail: f64,
    /// Standard error of the Monte Carlo expectation (0 when enumerated).
    pub std_err: f64,
}

/// Random-coding upper bound on the constant-list error probability at rate
/// `R` and list exponent `Theta` (nats/use), for codewords drawn i.i.d.
/// from `px`:
///
/// ```text
/// E[ exp(-M D(phi* || Phi)) 1{Phi < phi*} ] + Pr{ Phi >= phi* }
/// ```
///
/// with `M = ceil(e^{nR})`, `phi* = e^{-n(R-Theta)}`, `D` the binary
/// divergence in nats, and `Phi` the random-coding score tail of the pair
/// `(X, Y) ~ px x W`.
#[allow(clippy::too_many_arguments)]
pub fn rc_upper_bound(
    metric: &Metric,
    px: &Distribution,
    ch: &Channel,
    n: usize,
    rate_nats: f64,
    theta_nats: f64,
    mode: ExpectationMode,
    limits: &EnumerationLimits,
) -> Result<RcBound> {
    check_rate_theta(rate_nats, theta_nats)?;
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    if px.len() != ch.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "input distribution has {} entries, channel has {} inputs",
            px.len(),
            ch.input_size()
        )));
    }
    metric.validate_alphabets(ch.input_size(), ch.output_size())?;
    let nf = n as f64;
    let m = snap_to_integer((nf * rate_nats).exp()).ceil();
    let phi_star = (-nf * (rate_nats - theta_nats)).exp();
    let term = |phi: f64| -> (f64, f64) {
        if phi >= phi_star {
            (0.0, 1.0)
        } else {
            let d = binary_divergence(phi_star, phi).expect("arguments are probabilities");
            ((-m * d).exp(), 0.0)
        }
    };

    let (term_divergence, term_tail, std_err) = match mode {
        ExpectationMode::Enumerate => {
            check_enumeration(ch, n, limits)?;
            let (a, b) = rc_expectation_enumerate(metric, px, ch, n, term)?;
            (a, b, 0.0)
        }
        ExpectationMode::MonteCarlo { trials, seed } => {
            rc_expectation_mc(metric, px, ch, n, term, trials, seed)?
        }
    };
    let raw = term_divergence + term_tail;
    Ok(RcBound {
        value: raw.clamp(0.0, 1.0),
        clamped: raw > 1.0,
        term_divergence,
        term_tail,
        std_err,
    })
}

/// Exact expectation by grouping over output blocks: for each `y`, the
/// competitor score distribution is the convolution of per-letter scores
/// under `px`, and the transmitted score distribution is the convolution
/// under the unnormalized joint weights `px(x) W(y|x)`, whose total mass is
/// exactly `P(y)`. Both convolutions fold scores position by position, so a
/// transmitted support point is bitwise one of the competitor points and
/// tail ties resolve exactly.
fn rc_expectation_enumerate<F>(
    metric: &Metric,
    px: &Distribution,
    ch: &Channel,
    n: usize,
    term: F,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> (f64, f64),
{
    if let Metric::ErasuresOnly(reference) = metric {
        return rc_expectation_erasures(reference, px, ch, n, term);
    }
    let options = PhiOptions::default();
    let mut y = vec![0 as Symbol; n];
    let (mut acc_div, mut acc_tail) = (0.0, 0.0);
    loop {
        let mut competitor_letters = Vec::with_capacity(n);
        let mut transmitted_letters = Vec::with_capacity(n);
        let mut joint = vec![0.0; px.len()];
        for &yi in &y {
            competitor_letters.push(letter_dist(metric, yi, px.probs()));
            for (x, slot) in joint.iter_mut().enumerate() {
                *slot = px.prob(x) * ch.transition(x as Symbol, yi);
            }
            transmitted_letters.push(letter_dist(metric, yi, &joint));
        }
        let values: Vec<f64> = competitor_letters
            .iter()
            .flat_map(|l| l.finite.iter().map(|&(v, _)| v))
            .collect();
        let scale = common_scale(&values, options.max_denominator).unwrap_or(1.0);
        if scale != 1.0 {
            for letters in [&mut competitor_letters, &mut transmitted_letters] {
                for letter in letters.iter_mut() {
                    for point in &mut letter.finite {
                        point.0 = (point.0 * scale).round();
                    }
                }
            }
        }
        let competitor = ScoreDist::convolve(&competitor_letters, options.max_support)?;
        let transmitted = ScoreDist::convolve(&transmitted_letters, options.max_support)?;
        for &(t, w) in transmitted.points() {
            if w == 0.0 {
                continue;
            }
            let phi = competitor.tail_at_least(t).clamp(0.0, 1.0);
            let (dv, tl) = term(phi);
            acc_div += w * dv;
            acc_tail += w * tl;
        }
        // transmitted mass on the sentinel has tail probability one
        if transmitted.neg_inf_mass() > 0.0 {
            let (dv, tl) = term(1.0);
            acc_div += transmitted.neg_inf_mass() * dv;
            acc_tail += transmitted.neg_inf_mass() * tl;
        }
        if !next_output(&mut y, ch.output_size()) {
            break;
        }
    }
    Ok((acc_div, acc_tail))
}

/// Erasures-only scores are indicators, and under `(X, Y) ~ px x W` the
/// transmitted pair is always supported, so the tail depends on `y` alone:
/// the probability that a fresh codeword stays inside the channel support
/// at every letter.
fn rc_expectation_erasures<F>(
    reference: &Channel,
    px: &Distribution,
    ch: &Channel,
    n: usize,
    term: F,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> (f64, f64),
{
    if reference.input_size() != ch.input_size() || reference.output_size() != ch.output_size() {
        return Err(Error::DimensionMismatch(
            "erasures-only reference must share the channel alphabets".into(),
        ));
    }
    let mut y = vec![0 as Symbol; n];
    let (mut acc_div, mut acc_tail) = (0.0, 0.0);
    loop {
        let mut p_y = 1.0;
        let mut phi = 1.0;
        for &yi in &y {
            let mut letter_py = 0.0;
            let mut letter_support = 0.0;
            for x in 0..px.len() {
                letter_py += px.prob(x) * ch.transition(x as Symbol, yi);
                if reference.transition(x as Symbol, yi) > 0.0 {
                    letter_support += px.prob(x);
                }
            }
            p_y *= letter_py;
            phi *= letter_support;
        }
        if p_y > 0.0 {
            let (dv, tl) = term(phi.clamp(0.0, 1.0));
            acc_div += p_y * dv;
            acc_tail += p_y * tl;
        }
        if !next_output(&mut y, ch.output_size()) {
            break;
        }
    }
    Ok((acc_div, acc_tail))
}

fn rc_expectation_mc<F>(
    metric: &Metric,
    px: &Distribution,
    ch: &Channel,
    n: usize,
    term: F,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64, f64)>
where
    F: Fn(f64) -> (f64, f64),
{
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let root = Stream::from_seed(seed);
    let options = PhiOptions::default();
    let (mut acc_div, mut acc_tail, mut acc_sq) = (0.0, 0.0, 0.0);
    for trial in 0..trials {
        let mut stream = root.derive(trial);
        let x = crate::channel::Block::new(
            (0..n).map(|_| px.sample(&mut stream) as Symbol).collect(),
        );
        let y = ch.transmit(&x, &mut stream)?;
        let phi = crate::decoding::phi_random_coding_with(metric, px, &x, &y, &options)?;
        let (dv, tl) = term(phi);
        acc_div += dv;
        acc_tail += tl;
        let sample = dv + tl;
        acc_sq += sample * sample;
    }
    let t = trials as f64;
    let mean = (acc_div + acc_tail) / t;
    let var = (acc_sq / t - mean * mean).max(0.0);
    Ok((
        acc_div / t,
        acc_tail / t,
        (var / t).sqrt(),
    ))
}

/// Bound evaluations for one configured experiment point.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// Converse floor on the constant-list error probability.
    pub fano_floor: f64,
    /// Random-coding ceiling on the same quantity.
    pub rc_upper: f64,
    pub rc_clamped: bool,
    /// Converse ceiling on the normalized log-ratio, nats/use.
    pub converse_ratio_rhs: f64,
    pub n: usize,
    pub rate_nats: f64,
    pub theta_nats: f64,
    pub metric_kind: &'static str,
    pub channel_label: String,
    /// Exact decoder errors backing the converse evaluation.
    pub eps_first_kind: f64,
    pub zeta_second_kind: f64,
    /// Exact block mutual information of the code-induced input, nats.
    pub mutual_info_block_nats: f64,
}

/// Evaluates the full bound suite at one experiment point, using exact
/// enumeration throughout and a constant-list decoder with
/// `L = ceil(e^{n Theta})` for the error probabilities.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_bounds(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    px: &Distribution,
    rate_nats: f64,
    theta_nats: f64,
    channel_label: &str,
    limits: &EnumerationLimits,
) -> Result<BoundReport> {
    check_rate_theta(rate_nats, theta_nats)?;
    let n = cb.n();
    let m = cb.len() as u64;
    let permitted = (snap_to_integer((n as f64 * theta_nats).exp()).ceil() as u64).clamp(1, m);
    let decoder = DecoderSpec::top_l(permitted);
    let report = exact_decoder_error(ch, cb, metric, &decoder, limits)?;
    let mutual = code_mutual_information(ch, cb, limits)?;
    let fano = fano_lower_bound(ch, cb, metric, rate_nats, theta_nats, limits)?;
    let rc = rc_upper_bound(
        metric,
        px,
        ch,
        n,
        rate_nats,
        theta_nats,
        ExpectationMode::Enumerate,
        limits,
    )?;
    let eps = report.estimate.eps_first_kind;
    let zeta = report.estimate.zeta_second_kind;
    let converse = if eps < 1.0 && zeta < 1.0 {
        converse_ratio_rhs(mutual, n, eps, zeta)?
    } else {
        f64::INFINITY
    };
    Ok(BoundReport {
        fano_floor: fano,
        rc_upper: rc.value,
        rc_clamped: rc.clamped,
        converse_ratio_rhs: converse,
        n,
        rate_nats,
        theta_nats,
        metric_kind: metric.kind_name(),
        channel_label: channel_label.to_string(),
        eps_first_kind: eps,
        zeta_second_kind: zeta,
        mutual_info_block_nats: mutual,
    })
}
