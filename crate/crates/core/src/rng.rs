//! Seeded random substreams.
//!
//! Every Monte Carlo loop is split into chunks of [`CHUNK_SIZE`] draws. Each
//! chunk reads from its own ChaCha8 stream: the key is
//! `ChaCha8Rng::seed_from_u64(seed)` and the 64-bit stream id is
//! `chunk * LANES + lane`, so the photon, detector and trial-choice draws of
//! a chunk never share a stream. Chunk results are combined in chunk-index
//! order, which makes every estimate independent of how chunks are scheduled.

use alloc::vec::Vec;
use core::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every stream in this crate.
pub type StreamRng = ChaCha8Rng;

/// Draws per chunk.
pub const CHUNK_SIZE: u64 = 4096;

const LANES: u64 = 8;

/// Independent stream slots within one chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    Photon = 0,
    DetectorLeft = 1,
    DetectorRight = 2,
    Trial = 3,
    Mixture = 4,
}

pub fn stream(seed: u64, chunk: u64, lane: Lane) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk.wrapping_mul(LANES).wrapping_add(lane as u64));
    rng
}

/// Mixes a tag into a seed (SplitMix64 finalizer) to get an unrelated key
/// for a sub-computation, e.g. one CHSH term or one optimizer candidate.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn chunk_count(n: u64) -> u64 {
    n.div_ceil(CHUNK_SIZE)
}

fn chunk_range(n: u64, chunk: u64) -> Range<u64> {
    let start = chunk * CHUNK_SIZE;
    start..core::cmp::min(n, start + CHUNK_SIZE)
}

/// Runs `f` once per chunk of `0..n` and returns the results in chunk order.
pub(crate) fn map_chunks<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, Range<u64>) -> T + Sync + Send,
{
    let chunks = chunk_count(n);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|c| f(c, chunk_range(n, c)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(|c| f(c, chunk_range(n, c))).collect()
    }
}

/// Maps `f` over a slice, in parallel when enabled, preserving order.
pub(crate) fn map_items<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunks_cover_range_exactly() {
        let n = 3 * CHUNK_SIZE + 17;
        let ranges = map_chunks(n, |_, r| r);
        assert_eq!(ranges.len(), 4);
        assert_eq!(ranges[0].start, 0);
        assert_eq!(ranges.last().unwrap().end, n);
        for w in ranges.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        assert!(map_chunks(0, |_, r| r).is_empty());
    }

    #[test]
    fn lanes_and_chunks_are_distinct_streams() {
        let a: u64 = stream(7, 0, Lane::Photon).random();
        let b: u64 = stream(7, 0, Lane::DetectorRight).random();
        let c: u64 = stream(7, 1, Lane::Photon).random();
        let a2: u64 = stream(7, 0, Lane::Photon).random();
        assert_eq!(a, a2);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn derived_seeds_differ_by_tag() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }
}
