//! Parsers for the compact channel/metric/code/ratio/decoder specs used on
//! the command line and in config files.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ratiolist::analysis::{DecodeRule, DecoderSpec};
use ratiolist::channel::Channel;
use ratiolist::codes::{Codebook, RatioFunction};
use ratiolist::decoding::{Metric, MetricTable, TiePolicy};

/// `bsc:P`, `bec:E`, `noiseless:K`, or a channel file path.
pub fn parse_channel(spec: &str) -> Result<Channel> {
    if let Some(p) = spec.strip_prefix("bsc:") {
        return Ok(Channel::bsc(p.parse().context("bsc crossover probability")?)?);
    }
    if let Some(e) = spec.strip_prefix("bec:") {
        return Ok(Channel::bec(e.parse().context("bec erasure probability")?)?);
    }
    if let Some(k) = spec.strip_prefix("noiseless:") {
        return Ok(Channel::noiseless(k.parse().context("noiseless alphabet size")?)?);
    }
    Channel::from_file(spec).with_context(|| format!("reading channel file {spec}"))
}

/// `matched` (reference = transmission channel), `matched:FILE` (mismatched
/// reference), `hamming`, `erasures-only` / `erasures-only:FILE`,
/// `additive:FILE`.
pub fn parse_metric(spec: &str, channel: &Channel) -> Result<Metric> {
    match spec {
        "matched" => Ok(Metric::Matched(channel.clone())),
        "hamming" => Ok(Metric::Hamming),
        "erasures-only" => Ok(Metric::ErasuresOnly(channel.clone())),
        other => {
            if let Some(path) = other.strip_prefix("matched:") {
                return Ok(Metric::Matched(parse_channel(path)?));
            }
            if let Some(path) = other.strip_prefix("erasures-only:") {
                return Ok(Metric::ErasuresOnly(parse_channel(path)?));
            }
            if let Some(path) = other.strip_prefix("additive:") {
                let table = MetricTable::from_file(path)
                    .with_context(|| format!("reading metric table {path}"))?;
                return Ok(Metric::Additive(table));
            }
            bail!("unknown metric spec {other:?}");
        }
    }
}

/// What `--code` resolved to.
pub enum CodeSpec {
    /// Draw i.i.d. codewords; `messages` fixes M, otherwise the rate does.
    Random { messages: Option<u64> },
    /// Load a codebook file.
    File(String),
}

pub fn parse_code(spec: &str) -> Result<CodeSpec> {
    if spec == "random" {
        return Ok(CodeSpec::Random { messages: None });
    }
    if let Some(m) = spec.strip_prefix("random:") {
        return Ok(CodeSpec::Random {
            messages: Some(m.parse().context("random codebook size")?),
        });
    }
    if Path::new(spec).exists() {
        return Ok(CodeSpec::File(spec.to_string()));
    }
    bail!("code spec {spec:?} is neither random[:M] nor an existing file");
}

pub fn load_codebook_file(path: &str) -> Result<Codebook> {
    Codebook::from_file(path).with_context(|| format!("reading codebook file {path}"))
}

/// `full`, `constant:L`, `exponent` (reads theta), `iterated-log`,
/// `power:ALPHA`.
pub fn parse_ratio(spec: &str, theta_nats: Option<f64>) -> Result<RatioFunction> {
    let ratio = match spec {
        "full" => RatioFunction::Full,
        "exponent" => RatioFunction::Exponent {
            theta_nats: theta_nats
                .ok_or_else(|| anyhow!("ratio `exponent` needs --theta-bits"))?,
        },
        "iterated-log" => RatioFunction::IteratedLog,
        other => {
            if let Some(l) = other.strip_prefix("constant:") {
                RatioFunction::ConstantList {
                    list_size: l.parse().context("constant list size")?,
                }
            } else if let Some(a) = other.strip_prefix("power:") {
                RatioFunction::Power {
                    alpha: a.parse().context("power exponent")?,
                }
            } else {
                bail!("unknown ratio spec {other:?}");
            }
        }
    };
    ratio.validate()?;
    Ok(ratio)
}

/// `topl`, `topl-reject`, or `threshold` (reads `--tau-nats`).
pub fn parse_decoder(spec: &str, tau_nats: Option<f64>, permitted: u64) -> Result<DecoderSpec> {
    let rule = match spec {
        "topl" => DecodeRule::TopL {
            tie_policy: TiePolicy::LowestIndex,
        },
        "topl-reject" => DecodeRule::TopL {
            tie_policy: TiePolicy::RejectTies,
        },
        "threshold" => DecodeRule::Threshold {
            tau: tau_nats.ok_or_else(|| anyhow!("threshold decoder needs --tau-nats"))?,
        },
        other => bail!("unknown decoder {other:?}; expected topl, topl-reject, or threshold"),
    };
    Ok(DecoderSpec {
        rule,
        permitted_list: permitted,
    })
}
