//! Monte Carlo estimation of decoding errors and spectrum statistics.
//!
//! Trial `t` always runs on the child stream `derive(t)` of the seed's root
//! stream, so estimates do not depend on how trials are batched across
//! workers and any single trial can be replayed in isolation.
//!
//! For binary-alphabet instances whose metric is an affine function of the
//! Hamming distance (the Hamming metric itself, or a matched metric on a
//! symmetric 2x2 channel with nonzero entries), trials run on packed 64-bit
//! codewords and a distance histogram instead of full score vectors; the
//! decoding events produced are identical to the generic path.

use crate::channel::{Block, Channel, Symbol};
use crate::codes::Codebook;
use crate::decoding::{list_decode_threshold, list_decode_top_l, Metric, ScoreVector, TiePolicy};
use crate::rng::Stream;
use crate::stats::wilson_half_width;
use crate::{Error, Result};

use super::{
    DecodeRule, DecoderSpec, ErrorEstimate, EstimateMode, SpectrumKind,
    SpectrumSample,
};

/// Events recorded in one decoding trial.
#[derive(Debug, Clone, Copy)]
struct TrialEvents {
    missed_list: bool,
    oversize_list: bool,
    counting: bool,
}

/// Packed-codeword engine for binary instances with distance-affine scores.
struct BinaryAffine {
    packed: Vec<u64>,
    n: usize,
    /// Sign of the per-distance score slope: negative means smaller
    /// distance scores higher (the usual case), zero means all scores tie.
    slope_sign: i8,
}

impl BinaryAffine {
    fn try_new(ch: &Channel, cb: &Codebook, metric: &Metric) -> Option<Self> {
        if ch.input_size() != 2 || ch.output_size() != 2 || cb.n() > 64 {
            return None;
        }
        let slope_sign = match metric {
            Metric::Hamming => -1, // score = n - d
            Metric::Matched(reference) => {
                let (q00, q01) = (reference.transition(0, 0), reference.transition(0, 1));
                let (q10, q11) = (reference.transition(1, 0), reference.transition(1, 1));
                let symmetric = q00 == q11 && q01 == q10;
                if !symmetric || q00 == 0.0 || q01 == 0.0 {
                    return None;
                }
                // score = (n - d) ln q00 + d ln q01
                match q01.partial_cmp(&q00).unwrap() {
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => 1,
                }
            }
            _ => return None,
        };
        let packed = cb
            .codewords()
            .iter()
            .map(|cw| pack_binary(cw.symbols()))
            .collect();
        Some(BinaryAffine {
            packed,
            n: cb.n(),
            slope_sign,
        })
    }

    fn run_trial(
        &self,
        transmitted: usize,
        y: &Block,
        decoder: &DecoderSpec,
        metric: &Metric,
        hist: &mut [u64],
    ) -> TrialEvents {
        let y_packed = pack_binary(y.symbols());
        let d_tx = (self.packed[transmitted] ^ y_packed).count_ones() as usize;
        hist.fill(0);
        let mut ties_before = 0u64;
        for (m, &cw) in self.packed.iter().enumerate() {
            let d = (cw ^ y_packed).count_ones() as usize;
            hist[d] += 1;
            if d == d_tx && m < transmitted {
                ties_before += 1;
            }
        }
        let better: u64 = match self.slope_sign {
            -1 => hist[..d_tx].iter().sum(),
            1 => hist[d_tx + 1..].iter().sum(),
            _ => 0,
        };
        let ties: u64 = if self.slope_sign == 0 {
            self.packed.len() as u64
        } else {
            hist[d_tx]
        };
        if self.slope_sign == 0 {
            ties_before = transmitted as u64;
        }
        let permitted = decoder.permitted_list;
        let count = better + ties;
        match decoder.rule {
            DecodeRule::TopL { tie_policy } => {
                let in_list = match tie_policy {
                    TiePolicy::LowestIndex => better + ties_before < permitted,
                    TiePolicy::RejectTies => count <= permitted,
                };
                TrialEvents {
                    missed_list: !in_list,
                    oversize_list: false,
                    counting: count > permitted,
                }
            }
            DecodeRule::Threshold { tau } => {
                // Translate the score threshold into a distance cutoff and
                // read the list size off the histogram.
                let score_of = |d: usize| metric.score_of_distance(self.n, d);
                let in_list = score_of(d_tx) >= tau;
                let list_size: u64 = (0..=self.n)
                    .filter(|&d| score_of(d) >= tau)
                    .map(|d| hist[d])
                    .sum();
                TrialEvents {
                    missed_list: !in_list,
                    oversize_list: list_size > permitted,
                    counting: count > permitted,
                }
            }
        }
    }
}

fn pack_binary(symbols: &[Symbol]) -> u64 {
    symbols
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &s)| acc | (u64::from(s & 1) << i))
}

impl Metric {
    /// Block score as a function of Hamming distance, for the metrics the
    /// packed engine accepts.
    fn score_of_distance(&self, n: usize, d: usize) -> f64 {
        match self {
            Metric::Hamming => (n - d) as f64,
            Metric::Matched(reference) => {
                let (q00, q01) = (reference.transition(0, 0), reference.transition(0, 1));
                (n - d) as f64 * q00.ln() + d as f64 * q01.ln()
            }
            _ => unreachable!("packed engine only runs Hamming or matched metrics"),
        }
    }
}

fn generic_trial(
    transmitted: usize,
    y: &Block,
    cb: &Codebook,
    metric: &Metric,
    decoder: &DecoderSpec,
) -> TrialEvents {
    let scores: Vec<f64> = cb
        .codewords()
        .iter()
        .map(|cw| metric.score_symbols(cw.symbols(), y.symbols()))
        .collect();
    let sv = ScoreVector::new(scores);
    let permitted = decoder.permitted_list as usize;
    let list = match decoder.rule {
        DecodeRule::TopL { tie_policy } => {
            list_decode_top_l(&sv, permitted, tie_policy).expect("validated list size")
        }
        DecodeRule::Threshold { tau } => list_decode_threshold(&sv, tau),
    };
    let count = sv.count_at_least(sv.get(transmitted));
    TrialEvents {
        missed_list: !list.contains(transmitted),
        oversize_list: list.list_size() > permitted,
        counting: count > permitted,
    }
}

/// Monte Carlo estimate of the first-kind, second-kind, and counting error
/// probabilities: draw a uniform message, transmit it, decode, record the
/// three events. Reproducible per seed; standard errors are Wilson
/// half-widths at one sigma.
pub fn mc_list_error(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    decoder: &DecoderSpec,
    trials: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    cb.validate_alphabet(ch.input_size())?;
    metric.validate_alphabets(ch.input_size(), ch.output_size())?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let m = cb.len() as u64;
    if decoder.permitted_list == 0 || decoder.permitted_list > m {
        return Err(Error::InvalidParameter(format!(
            "permitted list size {} out of range [1, {m}]",
            decoder.permitted_list
        )));
    }
    let engine = BinaryAffine::try_new(ch, cb, metric);
    let mut hist = vec![0u64; cb.n() + 1];
    let root = Stream::from_seed(seed);
    let (mut k_eps, mut k_zeta, mut k_count) = (0u64, 0u64, 0u64);
    for trial in 0..trials {
        let mut stream = root.derive(trial);
        let transmitted = stream.next_below(m) as usize;
        let y = ch
            .transmit(cb.codeword(transmitted), &mut stream)
            .expect("validated codebook");
        let events = match &engine {
            Some(fast) => fast.run_trial(transmitted, &y, decoder, metric, &mut hist),
            None => generic_trial(transmitted, &y, cb, metric, decoder),
        };
        k_eps += u64::from(events.missed_list);
        k_zeta += u64::from(events.oversize_list);
        k_count += u64::from(events.counting);
    }
    let t = trials as f64;
    Ok(ErrorEstimate {
        eps_first_kind: k_eps as f64 / t,
        zeta_second_kind: k_zeta as f64 / t,
        p_er_counting: k_count as f64 / t,
        trials,
        eps_std_err: wilson_half_width(k_eps, trials, 1.0),
        zeta_std_err: wilson_half_width(k_zeta, trials, 1.0),
        counting_std_err: wilson_half_width(k_count, trials, 1.0),
        seed: Some(seed),
        mode: EstimateMode::MonteCarlo,
    })
}

/// Samples the normalized score-rank statistic `-(1/n) ln Phi` under a
/// uniform transmitted message.
pub fn phi_spectrum(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    trials: u64,
    seed: u64,
) -> Result<SpectrumSample> {
    cb.validate_alphabet(ch.input_size())?;
    metric.validate_alphabets(ch.input_size(), ch.output_size())?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let m = cb.len() as u64;
    let n = cb.n() as f64;
    let ln_m = (cb.len() as f64).ln();
    let root = Stream::from_seed(seed);
    let mut samples = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mut stream = root.derive(trial);
        let transmitted = stream.next_below(m) as usize;
        let y = ch
            .transmit(cb.codeword(transmitted), &mut stream)
            .expect("validated codebook");
        let target = metric.score_symbols(cb.codeword(transmitted).symbols(), y.symbols());
        let count = cb
            .codewords()
            .iter()
            .filter(|cw| metric.score_symbols(cw.symbols(), y.symbols()) >= target)
            .count();
        samples.push((ln_m - (count as f64).ln()) / n);
    }
    Ok(SpectrumSample::new(SpectrumKind::PhiRank, cb.n(), samples))
}

/// Samples the normalized information density `(1/n) ln [P(S|Y)/P(S)]`
/// under a uniform transmitted message, with the posterior computed from
/// the code-induced output distribution.
pub fn info_density_spectrum(
    ch: &Channel,
    cb: &Codebook,
    trials: u64,
    seed: u64,
) -> Result<SpectrumSample> {
    cb.validate_alphabet(ch.input_size())?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let m = cb.len() as u64;
    let n = cb.n() as f64;
    let root = Stream::from_seed(seed);
    let mut samples = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mut stream = root.derive(trial);
        let transmitted = stream.next_below(m) as usize;
        let y = ch
            .transmit(cb.codeword(transmitted), &mut stream)
            .expect("validated codebook");
        let w_tx = ch.block_probability(cb.codeword(transmitted), &y);
        let p_y: f64 = cb
            .codewords()
            .iter()
            .map(|cw| ch.block_probability(cw, &y))
            .sum::<f64>()
            / m as f64;
        samples.push((w_tx / p_y).ln() / n);
    }
    Ok(SpectrumSample::new(
        SpectrumKind::InfoDensity,
        cb.n(),
        samples,
    ))
}

/// Monte Carlo estimate of `E[-(1/n) ln Phi]`; returns the sample mean and
/// its standard error.
pub fn expected_phi_log_mc(
    ch: &Channel,
    cb: &Codebook,
    metric: &Metric,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let spectrum = phi_spectrum(ch, cb, metric, trials, seed)?;
    let mean = spectrum.mean();
    let var = spectrum
        .samples()
        .iter()
        .map(|s| (s - mean) * (s - mean))
        .sum::<f64>()
        / (spectrum.len().saturating_sub(1)).max(1) as f64;
    Ok((mean, (var / spectrum.len() as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::random_codebook;
    use crate::information::Distribution;
    use super::super::EnumerationLimits;

    // exact counting error as the oracle for Monte Carlo agreement checks
    fn exact_counting_for(
        ch: &Channel,
        cb: &Codebook,
        metric: &Metric,
        list_size: u64,
    ) -> Result<f64> {
        super::super::exact_counting_error(
            ch,
            cb,
            metric,
            list_size,
            &EnumerationLimits::default(),
        )
    }

    fn distinct_binary_codebook(n: usize, m: usize) -> Codebook {
        let codewords = (0..m)
            .map(|v| Block::new((0..n).map(|i| ((v >> i) & 1) as u16).collect()))
            .collect();
        Codebook::new(n, codewords, "distinct").unwrap()
    }

    #[test]
    fn noiseless_top1_never_errs() {
        let ch = Channel::noiseless(2).unwrap();
        let cb = distinct_binary_codebook(3, 8);
        let metric = Metric::Matched(ch.clone());
        let est = mc_list_error(&ch, &cb, &metric, &DecoderSpec::top_l(1), 2000, 5).unwrap();
        assert_eq!(est.eps_first_kind, 0.0);
        assert_eq!(est.zeta_second_kind, 0.0);
        assert_eq!(est.p_er_counting, 0.0);
        assert_eq!(est.mode, EstimateMode::MonteCarlo);
        assert_eq!(est.seed, Some(5));
    }

    #[test]
    fn bottomless_threshold_always_oversizes() {
        let ch = Channel::bsc(0.2).unwrap();
        let cb = distinct_binary_codebook(3, 8);
        let spec = DecoderSpec::threshold(f64::NEG_INFINITY, 2);
        let est = mc_list_error(&ch, &cb, &Metric::Hamming, &spec, 500, 6).unwrap();
        assert_eq!(est.zeta_second_kind, 1.0);
        assert_eq!(est.eps_first_kind, 0.0);
    }

    #[test]
    fn mc_matches_exact_counting_within_four_sigma() {
        let ch = Channel::bsc(0.2).unwrap();
        let px = Distribution::uniform(2);
        let mut stream = Stream::from_seed(404);
        let cb = random_codebook(4, 8, &px, &mut stream).unwrap();
        let metric = Metric::Hamming;
        let exact = exact_counting_for(&ch, &cb, &metric, 2).unwrap();
        let est =
            mc_list_error(&ch, &cb, &metric, &DecoderSpec::top_l(2), 100_000, 1234).unwrap();
        assert!(
            (est.p_er_counting - exact).abs() <= 4.0 * est.counting_std_err,
            "mc={} exact={exact} se={}",
            est.p_er_counting,
            est.counting_std_err
        );
    }

    // On Hamming scores both paths are exact integers, so every event must
    // agree bitwise. (Matched metrics are checked separately: the generic
    // float sums can split mathematically tied scores by an ulp while the
    // packed engine resolves distance ties exactly.)
    #[test]
    fn packed_engine_matches_generic_path_on_hamming() {
        let ch = Channel::bsc(0.11).unwrap();
        let px = Distribution::uniform(2);
        let mut stream = Stream::from_seed(7);
        let cb = random_codebook(9, 12, &px, &mut stream).unwrap();
        let metric = Metric::Hamming;
        let engine = BinaryAffine::try_new(&ch, &cb, &metric).expect("binary instance");
        let mut hist = vec![0u64; cb.n() + 1];
        let root = Stream::from_seed(321);
        for decoder in [
            DecoderSpec::top_l(3),
            DecoderSpec {
                rule: DecodeRule::TopL {
                    tie_policy: TiePolicy::RejectTies,
                },
                permitted_list: 3,
            },
            DecoderSpec::threshold(6.0, 3),
            DecoderSpec::threshold(-3.0, 2),
        ] {
            for trial in 0..400 {
                let mut s = root.derive(trial);
                let m = s.next_below(cb.len() as u64) as usize;
                let y = ch.transmit(cb.codeword(m), &mut s).unwrap();
                let fast = engine.run_trial(m, &y, &decoder, &metric, &mut hist);
                let slow = generic_trial(m, &y, &cb, &metric, &decoder);
                assert_eq!(fast.missed_list, slow.missed_list, "{decoder:?}");
                assert_eq!(fast.oversize_list, slow.oversize_list);
                assert_eq!(fast.counting, slow.counting);
            }
        }
    }

    #[test]
    fn packed_engine_rank_logic_matches_naive_distances_on_matched() {
        let ch = Channel::bsc(0.11).unwrap();
        let px = Distribution::uniform(2);
        let mut stream = Stream::from_seed(8);
        let cb = random_codebook(7, 10, &px, &mut stream).unwrap();
        let metric = Metric::Matched(ch.clone());
        let engine = BinaryAffine::try_new(&ch, &cb, &metric).expect("binary instance");
        let mut hist = vec![0u64; cb.n() + 1];
        let root = Stream::from_seed(31);
        let l = 3u64;
        for trial in 0..400 {
            let mut s = root.derive(trial);
            let m = s.next_below(cb.len() as u64) as usize;
            let y = ch.transmit(cb.codeword(m), &mut s).unwrap();
            let fast = engine.run_trial(m, &y, &DecoderSpec::top_l(l), &metric, &mut hist);
            // independent rank accounting straight from distances; smaller
            // distance means higher matched score since p < 1/2
            let dist = |cw: &Block| -> usize {
                cw.symbols()
                    .iter()
                    .zip(y.symbols())
                    .filter(|(a, b)| a != b)
                    .count()
            };
            let d_tx = dist(cb.codeword(m));
            let better = cb.codewords().iter().filter(|cw| dist(cw) < d_tx).count() as u64;
            let ties_before = cb.codewords()[..m]
                .iter()
                .filter(|cw| dist(cw) == d_tx)
                .count() as u64;
            let count = better + cb.codewords().iter().filter(|cw| dist(cw) == d_tx).count() as u64;
            assert_eq!(fast.missed_list, better + ties_before >= l);
            assert_eq!(fast.counting, count > l);
        }
    }

    #[test]
    fn packed_engine_rejects_asymmetric_or_wide_instances() {
        let bec = Channel::bec(0.3).unwrap();
        let cb = distinct_binary_codebook(3, 4);
        assert!(BinaryAffine::try_new(&bec, &cb, &Metric::Hamming).is_none());
        let asym = Channel::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        assert!(BinaryAffine::try_new(&asym, &cb, &Metric::Matched(asym.clone())).is_none());
        let zero = Channel::bsc(0.0).unwrap();
        assert!(BinaryAffine::try_new(&zero, &cb, &Metric::Matched(zero.clone())).is_none());
        // Hamming itself only needs binary alphabets
        let bsc = Channel::bsc(0.5).unwrap();
        assert!(BinaryAffine::try_new(&bsc, &cb, &Metric::Matched(bsc.clone())).is_some());
    }

    #[test]
    fn phi_spectrum_degenerate_codebooks() {
        let ch = Channel::bsc(0.2).unwrap();
        let dups = Codebook::new(2, vec![Block::from_usizes(&[0, 1]); 5], "dups").unwrap();
        let spec = phi_spectrum(&ch, &dups, &Metric::Hamming, 200, 9).unwrap();
        assert!(spec.samples().iter().all(|&s| s == 0.0));

        let noiseless = Channel::noiseless(2).unwrap();
        let cb = distinct_binary_codebook(2, 4);
        let metric = Metric::Matched(noiseless.clone());
        let spec = phi_spectrum(&noiseless, &cb, &metric, 200, 9).unwrap();
        let rate = 4f64.ln() / 2.0;
        assert!(spec.samples().iter().all(|&s| s == rate));
        assert_eq!(spec.quantile(0.05), rate);
    }

    #[test]
    fn info_density_degenerate_codebooks() {
        let ch = Channel::bsc(0.37).unwrap();
        let single = Codebook::new(2, vec![Block::from_usizes(&[0, 1])], "one").unwrap();
        let spec = info_density_spectrum(&ch, &single, 100, 3).unwrap();
        assert!(spec.samples().iter().all(|&s| s == 0.0));

        let noiseless = Channel::noiseless(2).unwrap();
        let cb = distinct_binary_codebook(2, 4);
        let spec = info_density_spectrum(&noiseless, &cb, 100, 3).unwrap();
        let rate = 4f64.ln() / 2.0;
        for &s in spec.samples() {
            assert!((s - rate).abs() < 1e-12);
        }
    }

    #[test]
    fn estimates_are_seed_reproducible() {
        let ch = Channel::bsc(0.11).unwrap();
        let px = Distribution::uniform(2);
        let mut stream = Stream::from_seed(21);
        let cb = random_codebook(5, 6, &px, &mut stream).unwrap();
        let a = mc_list_error(&ch, &cb, &Metric::Hamming, &DecoderSpec::top_l(2), 5000, 77)
            .unwrap();
        let b = mc_list_error(&ch, &cb, &Metric::Hamming, &DecoderSpec::top_l(2), 5000, 77)
            .unwrap();
        assert_eq!(a.eps_first_kind, b.eps_first_kind);
        assert_eq!(a.p_er_counting, b.p_er_counting);
    }
}
