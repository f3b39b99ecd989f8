//! Scalar information functionals and the capacity solver.
//!
//! Bound evaluators take and return nats; bits appear only in reporting
//! layers. The one deliberate exception is [`binary_entropy`], which is a
//! reporting-facing quantity and returns bits.

use std::f64::consts::LN_2;

use crate::channel::Channel;
use crate::rng::Stream;
use crate::{Error, Result};

/// Tolerance for the total mass of a distribution.
pub const DIST_TOLERANCE: f64 = 1e-12;

/// Default certificate-gap tolerance for [`blahut_arimoto`], in bits.
pub const BA_DEFAULT_TOL_BITS: f64 = 1e-9;

/// Default iteration cap for [`blahut_arimoto`].
pub const BA_DEFAULT_MAX_ITER: u64 = 100_000;

/// A probability distribution over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter("empty distribution".into()));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::ProbabilityOutOfRange(p));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > DIST_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Distribution { probs })
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0);
        Distribution {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(k: usize, at: usize) -> Self {
        assert!(at < k);
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        Distribution { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn sample(&self, stream: &mut Stream) -> usize {
        stream.sample_categorical(&self.probs)
    }
}

/// Output of the Blahut-Arimoto solver.
///
/// `capacity_bits` lies between the final lower and upper certificates;
/// `gap` is their difference (bits, nonnegative).
#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub capacity_bits: f64,
    pub optimal_input: Distribution,
    pub iterations: u64,
    pub gap: f64,
    pub converged: bool,
}

/// Binary entropy `h2(t)` in bits, with `0 log 0 = 0`.
pub fn binary_entropy(t: f64) -> Result<f64> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(Error::ProbabilityOutOfRange(t));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(t) + term(1.0 - t))
}

/// Binary divergence `D(p || q)` in nats.
///
/// Returns `+inf` when `q` is degenerate (0 or 1) while `p` disagrees with
/// it; `0 ln(0/q)` counts as 0.
pub fn binary_divergence(p: f64, q: f64) -> Result<f64> {
    for v in [p, q] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::ProbabilityOutOfRange(v));
        }
    }
    let part = |num: f64, den: f64| -> f64 {
        if num == 0.0 {
            0.0
        } else if den == 0.0 {
            f64::INFINITY
        } else {
            num * (num / den).ln()
        }
    };
    Ok(part(p, q) + part(1.0 - p, 1.0 - q))
}

/// Single-letter mutual information `I(X;Y)` in bits for input distribution
/// `px` and channel `ch`; zero-probability terms contribute 0.
pub fn mutual_information(px: &Distribution, ch: &Channel) -> Result<f64> {
    if px.len() != ch.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "input distribution has {} entries, channel has {} inputs",
            px.len(),
            ch.input_size()
        )));
    }
    let ny = ch.output_size();
    let mut py = vec![0.0; ny];
    for (x, &p) in px.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (q, &w) in py.iter_mut().zip(ch.row(x)) {
            *q += p * w;
        }
    }
    let mut nats = 0.0;
    for (x, &p) in px.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (&w, &q) in ch.row(x).iter().zip(&py) {
            if w > 0.0 {
                nats += p * w * (w / q).ln();
            }
        }
    }
    Ok(nats / LN_2)
}

/// Blahut-Arimoto capacity solver with upper/lower certificates.
///
/// Iterates until the certificate gap drops to `tol_bits` or `max_iter`
/// iterations have run; the result reports which happened via `converged`
/// and the final `gap`, so hitting the cap is never silent.
pub fn blahut_arimoto(ch: &Channel, tol_bits: f64, max_iter: u64) -> Result<CapacityResult> {
    if !(tol_bits.is_finite() && tol_bits > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol_bits}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
    }
    let nx = ch.input_size();
    let ny = ch.output_size();
    // Log-domain input weights keep the multiplicative update stable.
    let mut log_p = vec![-(nx as f64).ln(); nx];
    let mut p = vec![1.0 / nx as f64; nx];
    let mut best: Option<(f64, f64, Vec<f64>, u64)> = None; // (lower, upper, p, iter)

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut py = vec![0.0; ny];
        for (x, &px) in p.iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for (q, &w) in py.iter_mut().zip(ch.row(x)) {
                *q += px * w;
            }
        }
        // d[x] = D(W(.|x) || py) in nats; lower certificate is its mean
        // under p, upper certificate is its max over all inputs.
        let mut d = vec![0.0; nx];
        for (x, dx) in d.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (&w, &q) in ch.row(x).iter().zip(&py) {
                if w > 0.0 {
                    acc += w * (w / q).ln();
                }
            }
            *dx = acc;
        }
        let lower: f64 = (0..nx).map(|x| p[x] * d[x]).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let replace = match &best {
            None => true,
            Some((bl, bu, _, _)) => upper - lower < bu - bl,
        };
        if replace {
            best = Some((lower, upper, p.clone(), iterations));
        }
        if (upper - lower) / LN_2 <= tol_bits {
            break;
        }
        for x in 0..nx {
            log_p[x] += d[x];
        }
        let max_lp = log_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = log_p.iter().map(|&lp| (lp - max_lp).exp()).sum();
        let log_z = max_lp + z.ln();
        for x in 0..nx {
            log_p[x] -= log_z;
            p[x] = log_p[x].exp();
        }
    }

    let (lower, upper, p_best, _) = best.expect("at least one iteration ran");
    let gap = ((upper - lower) / LN_2).max(0.0);
    let cap_limit = (nx.min(ny) as f64).log2();
    let capacity_bits = ((lower + upper) / 2.0 / LN_2).clamp(0.0, cap_limit);
    // Renormalize the stored input against accumulated rounding before
    // handing it out as a Distribution.
    let total: f64 = p_best.iter().sum();
    let optimal_input = Distribution::new(p_best.iter().map(|&v| v / total).collect())?;
    Ok(CapacityResult {
        capacity_bits,
        optimal_input,
        iterations,
        gap,
        converged: gap <= tol_bits,
    })
}

/// Right-hand side of the list-decoding entropy inequality, in nats:
/// `h2(pe) + pe ln(|X|-1) + (1-pe) E[ln |L(Y)|]`.
pub fn fano_list_rhs(pe: f64, alphabet_size: usize, expected_log_list: f64) -> Result<f64> {
    if !pe.is_finite() || !(0.0..=1.0).contains(&pe) {
        return Err(Error::ProbabilityOutOfRange(pe));
    }
    if alphabet_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must be at least 2, got {alphabet_size}"
        )));
    }
    if !expected_log_list.is_finite() || expected_log_list < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "expected log list size must be nonnegative, got {expected_log_list}"
        )));
    }
    let h2_nats = binary_entropy(pe)? * LN_2;
    Ok(h2_nats + pe * ((alphabet_size - 1) as f64).ln() + (1.0 - pe) * expected_log_list)
}

/// Lower bound on the probability that an identification decoder's list
/// size exceeds its budget: `1 - C/(C + delta - eps)`, clamped to `[0, 1]`.
///
/// `capacity`, `eps` and `delta` must all be in the same units.
pub fn identification_list_bound(capacity: f64, eps: f64, delta: f64) -> Result<f64> {
    if !capacity.is_finite() || capacity <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "capacity must be positive, got {capacity}"
        )));
    }
    if eps.is_nan() || eps < 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need delta > eps >= 0, got eps={eps}, delta={delta}"
        )));
    }
    if delta <= eps {
        return Err(Error::InvalidParameter(format!(
            "need delta > eps, got eps={eps}, delta={delta}"
        )));
    }
    Ok((1.0 - capacity / (capacity + delta - eps)).clamp(0.0, 1.0))
}

/// Converse bound on the normalized log-ratio, in nats per use:
/// `(I(X^n;Y^n) + 1) / (n (1-eps) (1-zeta))` with `I` in nats for the block.
pub fn converse_ratio_rhs(
    mutual_info_block: f64,
    n: usize,
    eps: f64,
    zeta: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    if !mutual_info_block.is_finite() || mutual_info_block < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "block mutual information must be nonnegative, got {mutual_info_block}"
        )));
    }
    for v in [eps, zeta] {
        if !v.is_finite() || !(0.0..1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "error probabilities must lie in [0, 1), got {v}"
            )));
        }
    }
    Ok((mutual_info_block + 1.0) / (n as f64 * (1.0 - eps) * (1.0 - zeta)))
}

/// Companion tradeoff form: upper bound on the success product
/// `(1-eps)(1-zeta)`, namely `(I(X^n;Y^n) + 1/n) / ln r(M, n)`.
pub fn ratio_tradeoff_bound(mutual_info_block: f64, n: usize, log_ratio: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    if !(log_ratio.is_finite() && log_ratio > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log ratio must be positive, got {log_ratio}"
        )));
    }
    if !mutual_info_block.is_finite() || mutual_info_block < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "block mutual information must be nonnegative, got {mutual_info_block}"
        )));
    }
    Ok((mutual_info_block + 1.0 / n as f64) / log_ratio)
}
