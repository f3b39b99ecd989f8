//! Shared randomized-instance generator for integration tests: small
//! channels (optionally with zero transitions), codebooks with deliberate
//! duplicates, and tie-heavy metrics.
//!
//! Each test binary uses the subset it needs.
#![allow(dead_code)]

use ratiolist::channel::{Block, Channel, Symbol};
use ratiolist::codes::{Codebook, RatioFunction};
use ratiolist::decoding::{Metric, MetricTable};
use ratiolist::rng::Stream;

pub struct Instance {
    pub channel: Channel,
    pub codebook: Codebook,
    pub metric: Metric,
    pub ratio: RatioFunction,
}

pub fn random_channel(
    stream: &mut Stream,
    max_inputs: usize,
    max_outputs: usize,
    allow_zeros: bool,
) -> Channel {
    let nx = 2 + stream.next_below(max_inputs as u64 - 1) as usize;
    let ny = 2 + stream.next_below(max_outputs as u64 - 1) as usize;
    random_channel_exact(stream, nx, ny, allow_zeros)
}

pub fn random_channel_exact(
    stream: &mut Stream,
    nx: usize,
    ny: usize,
    allow_zeros: bool,
) -> Channel {
    let mut rows = Vec::with_capacity(nx);
    for _ in 0..nx {
        loop {
            let mut row: Vec<f64> = (0..ny).map(|_| stream.next_f64()).collect();
            if allow_zeros {
                for v in row.iter_mut() {
                    if stream.next_f64() < 0.3 {
                        *v = 0.0;
                    }
                }
            }
            let sum: f64 = row.iter().sum();
            if sum > 1e-3 {
                for v in row.iter_mut() {
                    *v /= sum;
                }
                rows.push(row);
                break;
            }
        }
    }
    Channel::from_rows(rows).expect("normalized rows")
}

pub fn random_codebook_with_duplicates(
    stream: &mut Stream,
    n: usize,
    m: usize,
    alphabet: usize,
) -> Codebook {
    let mut codewords: Vec<Block> = (0..m)
        .map(|_| {
            Block::new(
                (0..n)
                    .map(|_| stream.next_below(alphabet as u64) as Symbol)
                    .collect(),
            )
        })
        .collect();
    if m >= 2 && stream.next_f64() < 0.5 {
        let src = stream.next_below(m as u64) as usize;
        let dst = stream.next_below(m as u64) as usize;
        let copy = codewords[src].clone();
        codewords[dst] = copy;
    }
    Codebook::new(n, codewords, "test_instance").unwrap()
}

/// Dyadic additive table (quarter-integer entries), deliberately tie-heavy.
pub fn random_dyadic_table(stream: &mut Stream, nx: usize, ny: usize) -> MetricTable {
    let rows = (0..nx)
        .map(|_| {
            (0..ny)
                .map(|_| (stream.next_below(17) as f64 - 8.0) / 4.0)
                .collect()
        })
        .collect();
    MetricTable::new(rows).unwrap()
}

/// One enumerable instance: alphabets at most 3, `n <= 5`, `M <= 12`,
/// integral permitted list via full or constant-list ratios.
pub fn random_instance(stream: &mut Stream) -> Instance {
    let channel = random_channel(stream, 3, 3, true);
    let n = 1 + stream.next_below(5) as usize;
    let m = 1 + stream.next_below(12) as usize;
    let codebook = random_codebook_with_duplicates(stream, n, m, channel.input_size());
    let metric = match stream.next_below(5) {
        0 => Metric::Hamming,
        1 => Metric::Additive(random_dyadic_table(
            stream,
            channel.input_size(),
            channel.output_size(),
        )),
        2 => Metric::Matched(channel.clone()),
        3 => Metric::Matched(random_channel_exact(
            stream,
            channel.input_size(),
            channel.output_size(),
            true,
        )),
        _ => Metric::ErasuresOnly(channel.clone()),
    };
    let ratio = if stream.next_f64() < 0.3 {
        RatioFunction::Full
    } else {
        RatioFunction::ConstantList {
            list_size: 1 + stream.next_below(m as u64),
        }
    };
    Instance {
        channel,
        codebook,
        metric,
        ratio,
    }
}

