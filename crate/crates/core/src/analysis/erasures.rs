//! Support-search estimate of the erasures-only capacity objective.
//!
//! For each candidate input support `S` (a set of length-`n` blocks, input
//! uniform over `S`), the objective is `-(1/n) E[ ln Phi ]` where `Phi` is
//! the fraction of support members consistent with the channel output. The
//! transmitted block is always consistent, so
//! `Phi(y) = |{x in S : W^n(y|x) > 0}| / |S|`. Small instances maximize
//! over every nonempty support exhaustively; larger ones fall back to a
//! random support search and flag the result as a lower estimate.

use std::f64::consts::LN_2;

use crate::channel::{Block, Channel, Symbol};
use crate::rng::Stream;
use crate::{Error, Result};

use super::enumeration::next_output;
use super::EnumerationLimits;

/// Options for the support search.
#[derive(Debug, Clone)]
pub struct EoOptions {
    /// Exhaustive enumeration runs when `|X|^n` is at most this (every one
    /// of the up-to `2^20 - 1` nonempty supports is scored).
    pub exhaustive_strings_cap: usize,
    /// Random supports drawn when exhaustive search is infeasible.
    pub random_supports: u64,
    /// Largest random support size tried.
    pub random_support_cap: usize,
    /// Seed for the random search.
    pub seed: u64,
    /// Whether the random fallback may run at all.
    pub allow_random_fallback: bool,
}

impl Default for EoOptions {
    fn default() -> Self {
        EoOptions {
            exhaustive_strings_cap: 20,
            random_supports: 512,
            random_support_cap: 64,
            seed: 0,
            allow_random_fallback: true,
        }
    }
}

/// Best support found and its objective value.
#[derive(Debug, Clone)]
pub struct EoEstimate {
    /// Objective value in bits per channel use.
    pub bits_per_use: f64,
    /// The achieving input support.
    pub support: Vec<Block>,
    /// True when every nonempty support was scored.
    pub exhaustive: bool,
}

/// Maximizes `-(1/n) E ln Phi` over input supports for the erasures-only
/// metric on `ch` at block length `n`.
pub fn erasures_only_capacity_estimate(
    ch: &Channel,
    n: usize,
    options: &EoOptions,
    limits: &EnumerationLimits,
) -> Result<EoEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    let strings = (ch.input_size() as u128).checked_pow(n as u32);
    let outputs = (ch.output_size() as u128).checked_pow(n as u32);
    if outputs.is_none_or(|o| o > limits.max_outputs as u128) {
        return Err(Error::EnumerationCapExceeded {
            required: outputs.unwrap_or(u128::MAX),
            cap: limits.max_outputs,
        });
    }
    match strings {
        Some(k) if k <= options.exhaustive_strings_cap as u128 => {
            exhaustive_search(ch, n, k as usize)
        }
        _ if options.allow_random_fallback => random_search(ch, n, options),
        _ => Err(Error::EnumerationCapExceeded {
            required: strings.unwrap_or(u128::MAX),
            cap: options.exhaustive_strings_cap as u64,
        }),
    }
}

fn all_strings(ch: &Channel, n: usize, k: usize) -> Vec<Block> {
    let mut strings = Vec::with_capacity(k);
    let mut x = vec![0 as Symbol; n];
    loop {
        strings.push(Block::new(x.clone()));
        if !next_output(&mut x, ch.input_size()) {
            break;
        }
    }
    strings
}

fn exhaustive_search(ch: &Channel, n: usize, k: usize) -> Result<EoEstimate> {
    let strings = all_strings(ch, n, k);
    // ln(consistent / support size) lookup; entry [c][s] for c consistent
    // members out of a support of size s.
    let mut ln_ratio = vec![vec![0.0; k + 1]; k + 1];
    for (c, row) in ln_ratio.iter_mut().enumerate().skip(1) {
        for (s, slot) in row.iter_mut().enumerate().skip(1) {
            *slot = (c as f64 / s as f64).ln();
        }
    }
    let supports = 1usize << k;
    // acc[S] accumulates E[ln Phi] * |S| over the outputs processed so far
    let mut acc = vec![0.0; supports];
    let mut y = vec![0 as Symbol; n];
    let mut w = vec![0.0; k];
    loop {
        let mut mask = 0usize;
        for (i, x) in strings.iter().enumerate() {
            w[i] = ch.block_probability_symbols(x.symbols(), &y);
            if w[i] > 0.0 {
                mask |= 1 << i;
            }
        }
        if mask != 0 {
            for (support, slot) in acc.iter_mut().enumerate().skip(1) {
                let consistent = (support & mask).count_ones() as usize;
                if consistent == 0 {
                    continue;
                }
                let size = support.count_ones() as usize;
                let lg = ln_ratio[consistent][size];
                if lg == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                let mut bits = support & mask;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    inner += w[i];
                    bits &= bits - 1;
                }
                *slot += inner * lg;
            }
        }
        if !next_output(&mut y, ch.output_size()) {
            break;
        }
    }
    let mut best_support = 1usize;
    let mut best_value = f64::NEG_INFINITY;
    for (support, &a) in acc.iter().enumerate().skip(1) {
        let size = support.count_ones() as f64;
        let value = -(a / size) / n as f64;
        if value > best_value {
            best_value = value;
            best_support = support;
        }
    }
    let support = strings
        .iter()
        .enumerate()
        .filter(|(i, _)| best_support & (1 << i) != 0)
        .map(|(_, s)| s.clone())
        .collect();
    Ok(EoEstimate {
        // .max(0.0) folds the -0.0 of full-support channels
        bits_per_use: (best_value / LN_2).max(0.0),
        support,
        exhaustive: true,
    })
}

fn objective(ch: &Channel, n: usize, support: &[Block]) -> f64 {
    let size = support.len() as f64;
    let mut acc = 0.0;
    let mut y = vec![0 as Symbol; n];
    loop {
        let mut consistent = 0usize;
        for x in support {
            if x.symbols()
                .iter()
                .zip(&y)
                .all(|(&xi, &yi)| ch.transition(xi, yi) > 0.0)
            {
                consistent += 1;
            }
        }
        if consistent > 0 && consistent < support.len() {
            let lg = (consistent as f64 / size).ln();
            for x in support {
                let w = ch.block_probability_symbols(x.symbols(), &y);
                if w > 0.0 {
                    acc += w * lg;
                }
            }
        }
        if !next_output(&mut y, ch.output_size()) {
            break;
        }
    }
    -(acc / size) / n as f64
}

fn random_search(ch: &Channel, n: usize, options: &EoOptions) -> Result<EoEstimate> {
    if options.random_supports == 0 {
        return Err(Error::InvalidParameter(
            "random support search needs at least one draw".into(),
        ));
    }
    let root = Stream::from_seed(options.seed);
    let mut best_value = f64::NEG_INFINITY;
    let mut best: Vec<Block> = Vec::new();
    for draw in 0..options.random_supports {
        let mut stream = root.derive(draw);
        let size = 1 + stream.next_below(options.random_support_cap as u64) as usize;
        let mut support = Vec::with_capacity(size);
        for _ in 0..size {
            let block = Block::new(
                (0..n)
                    .map(|_| stream.next_below(ch.input_size() as u64) as Symbol)
                    .collect(),
            );
            if !support.contains(&block) {
                support.push(block);
            }
        }
        let value = objective(ch, n, &support);
        if value > best_value {
            best_value = value;
            best = support;
        }
    }
    Ok(EoEstimate {
        bits_per_use: (best_value / LN_2).max(0.0),
        support: best,
        exhaustive: false,
    })
}
