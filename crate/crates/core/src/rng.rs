//! Deterministic random streams for chunked parallel work.
//!
//! Chunk `c` of a job seeded with `seed` always draws from ChaCha8 stream
//! `c` under key `seed`, so results depend only on `(seed, chunk size)` and
//! never on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type StreamRng = ChaCha8Rng;

/// Samples per chunk used by every parallel driver in the crate.
pub const DEFAULT_CHUNK: usize = 256;

pub fn stream(seed: u64, chunk: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Key for an independent family of streams under the same user seed
/// (splitmix64 finalizer of `seed + label`).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed.wrapping_add(label.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Produces `n` values by calling `draw` once per item, splitting the work
/// into chunks of `chunk_size` with one independent stream per chunk.
pub fn par_replicate<T, F>(n: usize, seed: u64, chunk_size: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let chunk_size = chunk_size.max(1);
    let chunks = n.div_ceil(chunk_size);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream(seed, c as u64);
            let len = chunk_size.min(n - c * chunk_size);
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                out.push(draw(&mut rng));
            }
            out
        })
        .collect()
}
