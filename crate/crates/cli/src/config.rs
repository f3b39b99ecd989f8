//! Experiment configuration: command-line flags merged over an optional
//! key-value config file.
//!
//! The config file holds one `key = value` pair per line, `#` starts a
//! comment, and keys are exactly the long flag names (`channel`,
//! `rate-bits`, ...). A flag given on the command line always overrides the
//! file.

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;

/// Raw per-command flags; `None` means "fall back to config file, then
/// default".
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Key-value config file mirroring the long flags; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Channel: bsc:P | bec:E | noiseless:K | a channel file path.
    #[arg(long)]
    pub channel: Option<String>,
    /// Metric: matched | matched:CHANNEL_FILE | hamming | erasures-only |
    /// additive:TABLE_FILE.
    #[arg(long)]
    pub metric: Option<String>,
    /// Code: random | random:M | a codebook file path.
    #[arg(long)]
    pub code: Option<String>,
    /// Ratio function: full | constant:L | exponent | iterated-log |
    /// power:ALPHA (exponent reads --theta-bits).
    #[arg(long)]
    pub ratio: Option<String>,
    /// Block length; sweep accepts a comma-separated list.
    #[arg(long)]
    pub n: Option<String>,
    /// Rate in bits per use; sweep accepts a comma-separated list.
    #[arg(long = "rate-bits")]
    pub rate_bits: Option<String>,
    /// List-size exponent in bits per use; sweep accepts a list.
    #[arg(long = "theta-bits")]
    pub theta_bits: Option<String>,
    /// Permitted list size (overrides the ratio-derived value).
    #[arg(long = "list-size")]
    pub list_size: Option<u64>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Top-level seed; all randomness derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decoder: topl | topl-reject | threshold.
    #[arg(long)]
    pub decoder: Option<String>,
    /// Threshold decoder level in nats.
    #[arg(long = "tau-nats")]
    pub tau_nats: Option<f64>,
    /// Capacity solver tolerance in bits.
    #[arg(long = "tol-bits")]
    pub tol_bits: Option<f64>,
    /// Capacity solver iteration cap.
    #[arg(long = "max-iter")]
    pub max_iter: Option<u64>,
    /// Identification bound: epsilon in bits.
    #[arg(long = "id-eps-bits")]
    pub id_eps_bits: Option<f64>,
    /// Identification bound: delta in bits.
    #[arg(long = "id-delta-bits")]
    pub id_delta_bits: Option<f64>,
    /// Capacity in bits fed straight to idbound (skips the solver).
    #[arg(long = "capacity-bits")]
    pub capacity_bits: Option<f64>,
    /// Output file for csv/records formats.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: text | csv | records.
    #[arg(long)]
    pub format: Option<String>,
    /// Also sample the rank and information-density spectra with this many
    /// draws (simulate and sweep).
    #[arg(long = "spectrum-trials")]
    pub spectrum_trials: Option<u64>,
    /// Enumeration cap on |Y|^n.
    #[arg(long = "max-outputs")]
    pub max_outputs: Option<u64>,
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub channel: Option<String>,
    pub metric: String,
    pub code: String,
    pub ratio: Option<String>,
    pub ns: Vec<usize>,
    pub rates_bits: Vec<f64>,
    pub thetas_bits: Vec<f64>,
    /// Whether the grids were given at all (an explicitly empty grid is
    /// a valid, empty sweep; an absent one is a usage error).
    pub ns_given: bool,
    pub rates_given: bool,
    pub thetas_given: bool,
    pub list_size: Option<u64>,
    pub trials: u64,
    pub seed: u64,
    pub decoder: String,
    pub tau_nats: Option<f64>,
    pub tol_bits: f64,
    pub max_iter: u64,
    pub id_eps_bits: Option<f64>,
    pub id_delta_bits: Option<f64>,
    pub capacity_bits: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: crate::record::OutputFormat,
    pub spectrum_trials: Option<u64>,
    pub max_outputs: u64,
}

fn parse_config_file(path: &PathBuf) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "{}:{}: expected `key = value`, found {line:?}",
                path.display(),
                lineno + 1
            );
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn fall_back<T: FromStr>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(raw) => match raw.parse() {
            Ok(v) => Ok(Some(v)),
            Err(e) => bail!("config key {key}: {e}"),
        },
    }
}

fn parse_list<T: FromStr>(raw: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|e| anyhow::anyhow!("invalid {what} entry {s:?}: {e}"))
        })
        .collect()
}

impl CommonArgs {
    /// Resolves flags over the config file and defaults.
    pub fn resolve(self) -> Result<Experiment> {
        let file = match &self.config {
            Some(path) => parse_config_file(path)?,
            None => HashMap::new(),
        };
        let known_keys = [
            "channel",
            "metric",
            "code",
            "ratio",
            "n",
            "rate-bits",
            "theta-bits",
            "list-size",
            "trials",
            "seed",
            "decoder",
            "tau-nats",
            "tol-bits",
            "max-iter",
            "id-eps-bits",
            "id-delta-bits",
            "capacity-bits",
            "out",
            "format",
            "spectrum-trials",
            "max-outputs",
        ];
        for key in file.keys() {
            if !known_keys.contains(&key.as_str()) {
                bail!("config file has unknown key {key:?}");
            }
        }
        let ns_raw: Option<String> = fall_back(self.n, &file, "n")?;
        let rates_raw: Option<String> = fall_back(self.rate_bits, &file, "rate-bits")?;
        let thetas_raw: Option<String> = fall_back(self.theta_bits, &file, "theta-bits")?;
        let (ns_given, rates_given, thetas_given) =
            (ns_raw.is_some(), rates_raw.is_some(), thetas_raw.is_some());
        let format_raw: Option<String> = fall_back(self.format, &file, "format")?;
        let out = match self.out {
            Some(p) => Some(p),
            None => file.get("out").map(PathBuf::from),
        };
        Ok(Experiment {
            channel: fall_back(self.channel, &file, "channel")?,
            metric: fall_back(self.metric, &file, "metric")?.unwrap_or_else(|| "matched".into()),
            code: fall_back(self.code, &file, "code")?.unwrap_or_else(|| "random".into()),
            ratio: fall_back(self.ratio, &file, "ratio")?,
            ns: match ns_raw {
                Some(raw) => parse_list(&raw, "block length")?,
                None => Vec::new(),
            },
            rates_bits: match rates_raw {
                Some(raw) => parse_list(&raw, "rate")?,
                None => Vec::new(),
            },
            thetas_bits: match thetas_raw {
                Some(raw) => parse_list(&raw, "theta")?,
                None => Vec::new(),
            },
            ns_given,
            rates_given,
            thetas_given,
            list_size: fall_back(self.list_size, &file, "list-size")?,
            trials: fall_back(self.trials, &file, "trials")?.unwrap_or(10_000),
            seed: fall_back(self.seed, &file, "seed")?.unwrap_or(0),
            decoder: fall_back(self.decoder, &file, "decoder")?.unwrap_or_else(|| "topl".into()),
            tau_nats: fall_back(self.tau_nats, &file, "tau-nats")?,
            tol_bits: fall_back(self.tol_bits, &file, "tol-bits")?.unwrap_or(1e-9),
            max_iter: fall_back(self.max_iter, &file, "max-iter")?.unwrap_or(100_000),
            id_eps_bits: fall_back(self.id_eps_bits, &file, "id-eps-bits")?,
            id_delta_bits: fall_back(self.id_delta_bits, &file, "id-delta-bits")?,
            capacity_bits: fall_back(self.capacity_bits, &file, "capacity-bits")?,
            out,
            format: format_raw
                .as_deref()
                .unwrap_or("text")
                .parse()
                .map_err(|e: String| anyhow::anyhow!(e))?,
            spectrum_trials: fall_back(self.spectrum_trials, &file, "spectrum-trials")?,
            max_outputs: fall_back(self.max_outputs, &file, "max-outputs")?.unwrap_or(1 << 24),
        })
    }
}

impl Experiment {
    pub fn single_n(&self) -> Result<usize> {
        match self.ns.as_slice() {
            [n] => Ok(*n),
            [] => bail!("this command needs --n"),
            _ => bail!("this command takes a single --n"),
        }
    }

    pub fn single_rate_bits(&self) -> Result<f64> {
        match self.rates_bits.as_slice() {
            [r] => Ok(*r),
            [] => bail!("this command needs --rate-bits"),
            _ => bail!("this command takes a single --rate-bits"),
        }
    }

    pub fn single_theta_bits(&self) -> Result<f64> {
        match self.thetas_bits.as_slice() {
            [t] => Ok(*t),
            [] => bail!("this command needs --theta-bits"),
            _ => bail!("this command takes a single --theta-bits"),
        }
    }
}
