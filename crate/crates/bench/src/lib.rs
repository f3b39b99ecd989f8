//! Shared fixtures for the criterion benches.

use ratiolist::channel::Channel;
use ratiolist::codes::{random_codebook, Codebook};
use ratiolist::decoding::Metric;
use ratiolist::information::Distribution;
use ratiolist::rng::Stream;

/// A bsc(0.11) instance with a fresh uniform random codebook.
pub fn bsc_instance(n: usize, m: u64, seed: u64) -> (Channel, Codebook) {
    let channel = Channel::bsc(0.11).expect("valid crossover");
    let px = Distribution::uniform(2);
    let mut stream = Stream::from_seed(seed);
    let codebook = random_codebook(n, m, &px, &mut stream).expect("valid codebook");
    (channel, codebook)
}

pub fn matched(channel: &Channel) -> Metric {
    Metric::Matched(channel.clone())
}
