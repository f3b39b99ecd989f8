//! The six subcommands.
//!
//! Randomness discipline: a run's top-level `--seed` opens one root stream.
//! Experiment point `i` (grid index, 0 for single-point commands) works on
//! `root.derive(i)`; its codebook is drawn from child 0 of that stream and
//! its Monte Carlo trial seed is the first word of child 1. A sweep over a
//! single grid point therefore reproduces `simulate` on the same
//! configuration exactly.

use std::f64::consts::LN_2;

use anyhow::{anyhow, bail, Result};
use ratiolist::analysis::{
    erasures_only_capacity_estimate, evaluate_bounds, exact_counting_error, exact_error_via_phi,
    info_density_spectrum, mc_list_error, phi_spectrum, EnumerationLimits, EoOptions,
    ErrorEstimate, SpectrumSample,
};
use ratiolist::channel::Channel;
use ratiolist::codes::{
    list_size_for_theta, message_count_for_rate, random_codebook, Codebook, RatioFunction,
    MAX_REPLICATED_CODEWORDS,
};
use ratiolist::information::{blahut_arimoto, identification_list_bound, Distribution};
use ratiolist::rng::Stream;

use crate::config::Experiment;
use crate::record::RunRecord;
use crate::spec::{
    load_codebook_file, parse_channel, parse_code, parse_decoder, parse_metric, parse_ratio,
    CodeSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Capacity,
    Exact,
    Simulate,
    Bounds,
    Sweep,
    IdBound,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Capacity => "capacity",
            CommandKind::Exact => "exact",
            CommandKind::Simulate => "simulate",
            CommandKind::Bounds => "bounds",
            CommandKind::Sweep => "sweep",
            CommandKind::IdBound => "idbound",
        }
    }
}

/// Runs one command to completion, returning its records in grid order.
pub fn run(kind: CommandKind, exp: &Experiment) -> Result<Vec<RunRecord>> {
    match kind {
        CommandKind::Capacity => cmd_capacity(exp).map(|r| vec![r]),
        CommandKind::Exact => cmd_exact(exp).map(|r| vec![r]),
        CommandKind::Simulate => cmd_simulate(exp).map(|r| vec![r]),
        CommandKind::Bounds => cmd_bounds(exp).map(|r| vec![r]),
        CommandKind::Sweep => cmd_sweep(exp),
        CommandKind::IdBound => cmd_idbound(exp).map(|r| vec![r]),
    }
}

fn channel_of(exp: &Experiment) -> Result<(Channel, String)> {
    let spec = exp
        .channel
        .as_ref()
        .ok_or_else(|| anyhow!("this command needs --channel"))?;
    Ok((parse_channel(spec)?, spec.clone()))
}

fn limits_of(exp: &Experiment) -> EnumerationLimits {
    EnumerationLimits {
        max_outputs: exp.max_outputs,
    }
}

/// Ratio resolution order: explicit `--ratio`, else `--list-size`, else
/// `--theta-bits` as an exponent kind, else ordinary decoding.
fn ratio_of(exp: &Experiment) -> Result<RatioFunction> {
    let theta_nats = exp.thetas_bits.first().map(|t| t * LN_2);
    if let Some(spec) = &exp.ratio {
        return parse_ratio(spec, theta_nats);
    }
    if let Some(l) = exp.list_size {
        return Ok(RatioFunction::ConstantList { list_size: l });
    }
    if let Some(theta_nats) = theta_nats {
        return Ok(RatioFunction::Exponent { theta_nats });
    }
    Ok(RatioFunction::Full)
}

/// Loads or draws the codebook for single-point commands.
fn codebook_of(exp: &Experiment, channel: &Channel) -> Result<Codebook> {
    match parse_code(&exp.code)? {
        CodeSpec::File(path) => {
            let cb = load_codebook_file(&path)?;
            if let Ok(n) = exp.single_n() {
                if n != cb.n() {
                    bail!("--n {} disagrees with codebook block length {}", n, cb.n());
                }
            }
            cb.validate_alphabet(channel.input_size())?;
            Ok(cb)
        }
        CodeSpec::Random { messages } => {
            let n = exp.single_n()?;
            let m = match messages {
                Some(m) => m,
                None => message_count_for_rate(n, exp.single_rate_bits()?),
            };
            if m > MAX_REPLICATED_CODEWORDS {
                bail!("random codebook of {m} codewords exceeds the cap");
            }
            let px = Distribution::uniform(channel.input_size());
            let mut stream = Stream::from_seed(exp.seed).derive(0).derive(0);
            Ok(random_codebook(n, m, &px, &mut stream)?)
        }
    }
}

fn cmd_capacity(exp: &Experiment) -> Result<RunRecord> {
    let (channel, channel_spec) = channel_of(exp)?;
    // erasures-only capacity is a support search, not a solver run
    if exp.metric == "erasures-only" {
        let n = exp.single_n().unwrap_or(1);
        let estimate = erasures_only_capacity_estimate(
            &channel,
            n,
            &EoOptions {
                seed: exp.seed,
                ..EoOptions::default()
            },
            &limits_of(exp),
        )?;
        let mut record = RunRecord::new("capacity");
        record
            .cfg("channel", &channel_spec)
            .cfg("metric", "erasures-only")
            .cfg("n", n)
            .cfg("seed", exp.seed);
        record
            .res_f64("erasures_only_bits_per_use", estimate.bits_per_use)
            .res("support_size", estimate.support.len())
            .res("exhaustive", estimate.exhaustive);
        return Ok(record);
    }
    let result = blahut_arimoto(&channel, exp.tol_bits, exp.max_iter)?;
    let mut record = RunRecord::new("capacity");
    record
        .cfg("channel", &channel_spec)
        .cfg_f64("tol_bits", exp.tol_bits)
        .cfg("max_iter", exp.max_iter);
    let input = result
        .optimal_input
        .probs()
        .iter()
        .map(|&p| crate::record::fmt_float(p))
        .collect::<Vec<_>>()
        .join(" ");
    record
        .res_f64("capacity_bits", result.capacity_bits)
        .res_f64("capacity_nats", result.capacity_bits * LN_2)
        .res_f64("gap_bits", result.gap)
        .res("iterations", result.iterations)
        .res("converged", result.converged)
        .res("optimal_input", input);
    Ok(record)
}

fn cmd_exact(exp: &Experiment) -> Result<RunRecord> {
    let (channel, channel_spec) = channel_of(exp)?;
    let metric = parse_metric(&exp.metric, &channel)?;
    let codebook = codebook_of(exp, &channel)?;
    let ratio = ratio_of(exp)?;
    let limits = limits_of(exp);
    let m = codebook.len() as u64;
    let eval = ratio.evaluate(m, codebook.n());
    let counting = exact_counting_error(&channel, &codebook, &metric, eval.list_size, &limits)?;
    let via_rank = exact_error_via_phi(&channel, &codebook, &metric, &ratio, &limits)?;
    let mut record = RunRecord::new("exact");
    record
        .cfg("channel", &channel_spec)
        .cfg("metric", &exp.metric)
        .cfg("code", &exp.code)
        .cfg("ratio", ratio.kind_name())
        .cfg("n", codebook.n())
        .cfg("m", m)
        .cfg("list_size", eval.list_size)
        .cfg_f64("ratio_value", eval.ratio)
        .cfg("max_outputs", exp.max_outputs);
    record
        .res_f64("p_counting", counting)
        .res_f64("p_rank", via_rank)
        .res_f64("identity_residual", (counting - via_rank).abs());
    Ok(record)
}

fn estimate_fields(record: &mut RunRecord, estimate: &ErrorEstimate) {
    record
        .res_f64("eps_first_kind", estimate.eps_first_kind)
        .res_f64("eps_std_err", estimate.eps_std_err)
        .res_f64("zeta_second_kind", estimate.zeta_second_kind)
        .res_f64("zeta_std_err", estimate.zeta_std_err)
        .res_f64("p_er_counting", estimate.p_er_counting)
        .res_f64("counting_std_err", estimate.counting_std_err);
}

/// One random-code Monte Carlo point, shared by `simulate` and `sweep`.
#[allow(clippy::too_many_arguments)]
fn random_point_record(
    command: &'static str,
    channel: &Channel,
    channel_spec: &str,
    metric_spec: &str,
    n: usize,
    rate_bits: f64,
    theta_bits: f64,
    exp: &Experiment,
    grid_index: u64,
) -> Result<RunRecord> {
    let annotate = |record: &mut RunRecord, m: u64, l: u64| {
        record
            .cfg("grid_index", grid_index)
            .cfg("channel", channel_spec)
            .cfg("metric", metric_spec)
            .cfg("code", "random")
            .cfg("decoder", &exp.decoder)
            .cfg("n", n)
            .cfg_f64("rate_bits", rate_bits)
            .cfg_f64("theta_bits", theta_bits)
            .cfg("m", m)
            .cfg("list_size", l)
            .cfg("trials", exp.trials)
            .cfg("seed", exp.seed);
    };
    let m = message_count_for_rate(n, rate_bits);
    let l = list_size_for_theta(n, theta_bits).clamp(1, m);
    if m > MAX_REPLICATED_CODEWORDS {
        let mut record = RunRecord::skipped(
            command,
            format!("codebook of {m} codewords exceeds the cap of {MAX_REPLICATED_CODEWORDS}"),
        );
        annotate(&mut record, m, l);
        return Ok(record);
    }
    let metric = parse_metric(metric_spec, channel)?;
    let root = Stream::from_seed(exp.seed).derive(grid_index);
    let px = Distribution::uniform(channel.input_size());
    let codebook = random_codebook(n, m, &px, &mut root.derive(0))?;
    let decoder = parse_decoder(&exp.decoder, exp.tau_nats, l)?;
    let trial_seed = root.derive(1).next_u64();
    let estimate = mc_list_error(channel, &codebook, &metric, &decoder, exp.trials, trial_seed)?;
    let mut record = RunRecord::new(command);
    annotate(&mut record, m, l);
    estimate_fields(&mut record, &estimate);
    if let Some(spectrum_trials) = exp.spectrum_trials {
        let rank_seed = root.derive(2).next_u64();
        let density_seed = root.derive(3).next_u64();
        let rank = phi_spectrum(channel, &codebook, &metric, spectrum_trials, rank_seed)?;
        let density = info_density_spectrum(channel, &codebook, spectrum_trials, density_seed)?;
        spectrum_fields(&mut record, "rank_spectrum", &rank);
        spectrum_fields(&mut record, "info_density", &density);
    }
    Ok(record)
}

fn cmd_simulate(exp: &Experiment) -> Result<RunRecord> {
    let (channel, channel_spec) = channel_of(exp)?;
    // Random codes at an (R, Theta) point go through the shared point
    // runner so that a one-point sweep is bit-identical to simulate.
    if matches!(parse_code(&exp.code)?, CodeSpec::Random { messages: None })
        && exp.rates_bits.len() == 1
        && exp.thetas_bits.len() == 1
        && exp.list_size.is_none()
        && exp.ratio.is_none()
    {
        return random_point_record(
            "simulate",
            &channel,
            &channel_spec,
            &exp.metric,
            exp.single_n()?,
            exp.single_rate_bits()?,
            exp.single_theta_bits()?,
            exp,
            0,
        );
    }
    let metric = parse_metric(&exp.metric, &channel)?;
    let codebook = codebook_of(exp, &channel)?;
    let m = codebook.len() as u64;
    let ratio = ratio_of(exp)?;
    let permitted = match exp.list_size {
        Some(l) => l.clamp(1, m),
        None => ratio.evaluate(m, codebook.n()).list_size,
    };
    let decoder = parse_decoder(&exp.decoder, exp.tau_nats, permitted)?;
    let estimate = mc_list_error(&channel, &codebook, &metric, &decoder, exp.trials, exp.seed)?;
    let mut record = RunRecord::new("simulate");
    record
        .cfg("channel", &channel_spec)
        .cfg("metric", &exp.metric)
        .cfg("code", &exp.code)
        .cfg("decoder", &exp.decoder)
        .cfg("n", codebook.n())
        .cfg("m", m)
        .cfg("list_size", permitted)
        .cfg("trials", exp.trials)
        .cfg("seed", exp.seed);
    if let Some(tau) = exp.tau_nats {
        record.cfg_f64("tau_nats", tau);
    }
    estimate_fields(&mut record, &estimate);
    if let Some(spectrum_trials) = exp.spectrum_trials {
        let root = Stream::from_seed(exp.seed);
        let rank_seed = root.derive(2).next_u64();
        let density_seed = root.derive(3).next_u64();
        let rank = phi_spectrum(&channel, &codebook, &metric, spectrum_trials, rank_seed)?;
        let density =
            info_density_spectrum(&channel, &codebook, spectrum_trials, density_seed)?;
        spectrum_fields(&mut record, "rank_spectrum", &rank);
        spectrum_fields(&mut record, "info_density", &density);
    }
    Ok(record)
}

fn cmd_bounds(exp: &Experiment) -> Result<RunRecord> {
    let (channel, channel_spec) = channel_of(exp)?;
    let metric = parse_metric(&exp.metric, &channel)?;
    let codebook = codebook_of(exp, &channel)?;
    let rate_nats = exp.single_rate_bits()? * LN_2;
    let theta_nats = exp.single_theta_bits()? * LN_2;
    let px = Distribution::uniform(channel.input_size());
    let report = evaluate_bounds(
        &channel,
        &codebook,
        &metric,
        &px,
        rate_nats,
        theta_nats,
        &channel_spec,
        &limits_of(exp),
    )?;
    let mut record = RunRecord::new("bounds");
    record
        .cfg("channel", &channel_spec)
        .cfg("metric", &exp.metric)
        .cfg("code", &exp.code)
        .cfg("n", report.n)
        .cfg("m", codebook.len())
        .cfg_f64("rate_bits", rate_nats / LN_2)
        .cfg_f64("theta_bits", theta_nats / LN_2);
    record
        .res_f64("fano_floor", report.fano_floor)
        .res_f64("rc_upper", report.rc_upper)
        .res("rc_clamped", report.rc_clamped)
        .res_f64("converse_ratio_rhs_nats", report.converse_ratio_rhs)
        .res_f64("converse_ratio_rhs_bits", report.converse_ratio_rhs / LN_2)
        .res_f64("eps_first_kind", report.eps_first_kind)
        .res_f64("zeta_second_kind", report.zeta_second_kind)
        .res_f64("mutual_info_block_nats", report.mutual_info_block_nats);
    Ok(record)
}

/// Fixed CSV schema of sweep records; an empty grid still gets this header.
pub fn sweep_csv_columns(with_spectrum: bool) -> Vec<String> {
    let mut columns: Vec<String> = [
        "command",
        "version",
        "rng",
        "status",
        "grid_index",
        "channel",
        "metric",
        "code",
        "decoder",
        "n",
        "rate_bits",
        "theta_bits",
        "m",
        "list_size",
        "trials",
        "seed",
        "eps_first_kind",
        "eps_std_err",
        "zeta_second_kind",
        "zeta_std_err",
        "p_er_counting",
        "counting_std_err",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if with_spectrum {
        for prefix in ["rank_spectrum", "info_density"] {
            for suffix in ["mean", "q01", "q05"] {
                columns.push(format!("{prefix}_{suffix}"));
            }
        }
    }
    columns
}

fn cmd_sweep(exp: &Experiment) -> Result<Vec<RunRecord>> {
    let (channel, channel_spec) = channel_of(exp)?;
    if !exp.ns_given || !exp.rates_given || !exp.thetas_given {
        bail!("sweep needs --n, --rate-bits, and --theta-bits grids");
    }
    if !matches!(parse_code(&exp.code)?, CodeSpec::Random { messages: None }) {
        bail!("sweep draws a fresh random codebook per grid point; use --code random");
    }
    let mut records = Vec::new();
    let mut grid_index = 0u64;
    for &n in &exp.ns {
        for &rate_bits in &exp.rates_bits {
            for &theta_bits in &exp.thetas_bits {
                records.push(random_point_record(
                    "sweep",
                    &channel,
                    &channel_spec,
                    &exp.metric,
                    n,
                    rate_bits,
                    theta_bits,
                    exp,
                    grid_index,
                )?);
                grid_index += 1;
            }
        }
    }
    Ok(records)
}

fn cmd_idbound(exp: &Experiment) -> Result<RunRecord> {
    let eps = exp
        .id_eps_bits
        .ok_or_else(|| anyhow!("idbound needs --id-eps-bits"))?;
    let delta = exp
        .id_delta_bits
        .ok_or_else(|| anyhow!("idbound needs --id-delta-bits"))?;
    let mut record = RunRecord::new("idbound");
    let capacity_bits = match exp.capacity_bits {
        Some(c) => {
            record.cfg_f64("capacity_bits_in", c);
            c
        }
        None => {
            let (channel, channel_spec) = channel_of(exp)?;
            let result = blahut_arimoto(&channel, exp.tol_bits, exp.max_iter)?;
            record.cfg("channel", &channel_spec);
            result.capacity_bits
        }
    };
    record.cfg_f64("id_eps_bits", eps).cfg_f64("id_delta_bits", delta);
    let bound = identification_list_bound(capacity_bits, eps, delta)?;
    record
        .res_f64("capacity_bits", capacity_bits)
        .res_f64("oversize_probability_bound", bound);
    Ok(record)
}

/// Appends empirical spectrum summaries (mean, lower-tail quantiles) under
/// a key prefix.
fn spectrum_fields(record: &mut RunRecord, prefix: &str, spectrum: &SpectrumSample) {
    record
        .res_f64(&format!("{prefix}_mean"), spectrum.mean())
        .res_f64(&format!("{prefix}_q01"), spectrum.p_liminf_estimate())
        .res_f64(&format!("{prefix}_q05"), spectrum.quantile(0.05));
}
