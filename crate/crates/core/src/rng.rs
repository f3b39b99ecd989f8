//! Counter-based splittable random number generation.
//!
//! Every random draw in this crate flows through a [`Stream`]. The generator
//! is fully specified here so that runs are bit-identical across platforms
//! and across any parallel decomposition of the work.
//!
//! A stream is a pair `(key, counter)`. Output `i` (1-based) is
//!
//! ```text
//! out_i = mix64(key + i * 0x9E3779B97F4A7C15)
//! ```
//!
//! where `mix64` is the 64-bit finalizer
//!
//! ```text
//! z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//! z ^= z >> 27;  z *= 0x94D049BB133111EB;
//! z ^= z >> 31;
//! ```
//!
//! (all arithmetic mod 2^64). Seeding sets `key = mix64(seed + GAMMA)`.
//! Child stream `j` of a stream with key `k` has key
//! `mix64(k ^ mix64(j * 0xD1B54A32D192ED03 + GAMMA))` and counter 0, so
//! derivation never advances or perturbs the parent. Uniform doubles use the
//! top 53 bits: `(out >> 11) * 2^-53`, which lies in `[0, 1)`.
//!
//! Workers that split a job derive one child per unit of work (per trial,
//! per grid point), which makes merged results independent of worker count
//! and scheduling.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const DERIVE_GAMMA: u64 = 0xD1B5_4A32_D192_ED03;

/// Identifier of the generator algorithm, echoed into run records.
pub const RNG_ALGORITHM: &str = "splitmix64-counter-v1";

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic, splittable stream of pseudo-random 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    /// Creates the root stream for a seed.
    pub fn from_seed(seed: u64) -> Self {
        Stream {
            key: mix64(seed.wrapping_add(GAMMA)),
            counter: 0,
        }
    }

    /// Derives child stream `index` without advancing this stream.
    pub fn derive(&self, index: u64) -> Self {
        Stream {
            key: mix64(self.key ^ mix64(index.wrapping_mul(DERIVE_GAMMA).wrapping_add(GAMMA))),
            counter: 0,
        }
    }

    /// Next 64-bit word.
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Next double in `[0, 1)` (53 random bits).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` by rejection, free of modulo bias.
    ///
    /// # Panics
    ///
    /// Panics if `bound` is zero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below requires a positive bound");
        if bound.is_power_of_two() {
            return self.next_u64() & (bound - 1);
        }
        // Largest multiple of `bound` that fits in u64; draws above it are
        // rejected so every residue is equally likely.
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Samples an index from the categorical distribution given by `probs`
    /// (assumed nonnegative, summing to 1 within rounding).
    ///
    /// Uses a single uniform draw and a linear CDF walk; if accumulated
    /// rounding leaves the draw above the total mass, the last index with
    /// positive mass is returned.
    pub fn sample_categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > 0.0 {
                last_positive = i;
                acc += p;
                if u < acc {
                    return i;
                }
            }
        }
        last_positive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Stream::from_seed(7);
        let mut b = Stream::from_seed(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn derive_does_not_touch_parent() {
        let mut a = Stream::from_seed(7);
        let first = a.clone();
        let _child = a.derive(3);
        assert_eq!(a, first);
        assert_eq!(a.next_u64(), {
            let mut c = first.clone();
            c.next_u64()
        });
    }

    #[test]
    fn derived_streams_differ_from_parent_and_each_other() {
        let root = Stream::from_seed(1);
        let mut s0 = root.derive(0);
        let mut s1 = root.derive(1);
        let mut p = root.clone();
        let (a, b, c) = (s0.next_u64(), s1.next_u64(), p.next_u64());
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
    }

    // Frozen first outputs of seed 1, cross-checked against an independent
    // implementation of the documented algorithm; guards the generator
    // definition against accidental change, which would silently break run
    // reproducibility.
    #[test]
    fn known_answer_seed_one() {
        let mut s = Stream::from_seed(1);
        assert_eq!(s.next_u64(), 0x5e41_ab08_7439_611e);
        assert_eq!(s.next_u64(), 0xf18d_6ce9_3d6c_f1ee);
        assert_eq!(s.next_u64(), 0x0b95_f66d_327e_8d78);
        let mut child = Stream::from_seed(1).derive(7);
        assert_eq!(child.next_u64(), 0x66ee_f960_c3f6_012c);
        let mut again = Stream::from_seed(1);
        assert!((again.next_f64() - 0.368_189_515_651_669_46).abs() < 1e-17);
    }

    #[test]
    fn doubles_are_in_unit_interval() {
        let mut s = Stream::from_seed(42);
        for _ in 0..10_000 {
            let u = s.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn next_below_stays_in_range_and_hits_everything_small() {
        let mut s = Stream::from_seed(5);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[s.next_below(7) as usize] = true;
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn categorical_point_mass_always_picks_it() {
        let mut s = Stream::from_seed(9);
        for _ in 0..100 {
            assert_eq!(s.sample_categorical(&[0.0, 1.0, 0.0]), 1);
        }
    }
}
