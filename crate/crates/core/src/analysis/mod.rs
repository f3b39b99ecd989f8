//! Exact and Monte Carlo error probabilities, information-spectrum samples,
//! and the converse/achievability bound evaluators.
//!
//! Exact quantities come from exhaustive enumeration over all channel
//! outputs weighted by `W^n(y|x)`; the enumeration budget is guarded by
//! [`EnumerationLimits`]. Monte Carlo quantities derive one child stream per
//! trial from the top-level seed, so every estimate is reproducible and
//! independent of any parallel scheduling of the trials, and probabilities
//! come with Wilson standard errors.

mod bounds;
mod enumeration;
mod erasures;
mod montecarlo;

pub use bounds::{
    evaluate_bounds, fano_lower_bound, fano_lower_bound_mc, rc_upper_bound, BoundReport,
    ExpectationMode, RcBound,
};
pub use enumeration::{
    code_mutual_information, exact_counting_error, exact_decoder_error, exact_error_via_phi,
    expected_phi_log_exact, replication_monotonicity_check, spectrum_inequality_check,
    ExactDecoderReport, SpectrumInequalityCheck,
};
pub use erasures::{erasures_only_capacity_estimate, EoEstimate, EoOptions};
pub use montecarlo::{info_density_spectrum, mc_list_error, phi_spectrum};

use crate::decoding::TiePolicy;

/// Budget guard for exhaustive enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimits {
    /// Cap on `|Y|^n`, the number of channel output blocks walked.
    pub max_outputs: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_outputs: 1 << 24,
        }
    }
}

/// The list-forming rule of a decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecodeRule {
    /// Constant list size equal to the permitted size.
    TopL { tie_policy: TiePolicy },
    /// Data-dependent list: every message whose score reaches `tau`.
    Threshold { tau: f64 },
}

/// A decoder plus the permitted list size the second-kind error is judged
/// against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderSpec {
    pub rule: DecodeRule,
    pub permitted_list: u64,
}

impl DecoderSpec {
    pub fn top_l(permitted_list: u64) -> Self {
        DecoderSpec {
            rule: DecodeRule::TopL {
                tie_policy: TiePolicy::LowestIndex,
            },
            permitted_list,
        }
    }

    pub fn threshold(tau: f64, permitted_list: u64) -> Self {
        DecoderSpec {
            rule: DecodeRule::Threshold { tau },
            permitted_list,
        }
    }
}

/// Whether an estimate came from enumeration or sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

/// Error probabilities of one decoding experiment.
///
/// `eps_first_kind` is the probability the transmitted message misses the
/// list; `zeta_second_kind` the probability the list exceeds the permitted
/// size; `p_er_counting` the probability that the number of codewords
/// scoring at least as high as the transmitted one exceeds the permitted
/// size. Exact estimates have zero standard errors, no seed, and
/// `trials == 0`.
#[derive(Debug, Clone)]
pub struct ErrorEstimate {
    pub eps_first_kind: f64,
    pub zeta_second_kind: f64,
    pub p_er_counting: f64,
    pub trials: u64,
    pub eps_std_err: f64,
    pub zeta_std_err: f64,
    pub counting_std_err: f64,
    pub seed: Option<u64>,
    pub mode: EstimateMode,
}

/// Which statistic a spectrum holds samples of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// `-(1/n) ln Phi`, the normalized log of the score-rank fraction;
    /// samples lie in `[0, (1/n) ln M]`.
    PhiRank,
    /// `(1/n) ln [P(S|Y)/P(S)]`, the normalized information density.
    InfoDensity,
}

/// Empirical samples of a per-use information statistic at fixed block
/// length; the asymptotic quantity it feeds is approached by re-sampling at
/// increasing `n`, never computed here.
#[derive(Debug, Clone)]
pub struct SpectrumSample {
    kind: SpectrumKind,
    n: usize,
    samples: Vec<f64>,
}

impl SpectrumSample {
    pub(crate) fn new(kind: SpectrumKind, n: usize, samples: Vec<f64>) -> Self {
        SpectrumSample { kind, n, samples }
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Empirical quantile (lowest order statistic covering mass `q`).
    pub fn quantile(&self, q: f64) -> f64 {
        assert!((0.0..=1.0).contains(&q), "quantile level must be in [0,1]");
        let mut sorted = self.samples.clone();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("samples are finite"));
        let rank = ((q * sorted.len() as f64).ceil() as usize).max(1) - 1;
        sorted[rank.min(sorted.len() - 1)]
    }

    /// Lower-tail estimate standing in for the statistic's limit-inferior
    /// in probability: by default the 1% empirical quantile. The limit
    /// itself is over block lengths and is never computed here; quantiles
    /// at increasing `n` exhibit the trend.
    pub fn p_liminf_estimate(&self) -> f64 {
        self.quantile(0.01)
    }

    /// Fraction of samples at or below `t`.
    pub fn cdf_at(&self, t: f64) -> f64 {
        self.samples.iter().filter(|&&s| s <= t).count() as f64 / self.samples.len() as f64
    }
}
