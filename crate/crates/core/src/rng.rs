//! Seeded, counter-derived random streams and a thread-capped rayon pool.
//!
//! Work is cut into fixed-size blocks; block `i` always draws from stream `i`
//! of the seed, so results do not depend on how many threads run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per independent stream.
pub const BLOCK: usize = 1024;

/// Stream `stream` of generator `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Thread count from `BPLAB_THREADS`, if set to a positive integer.
pub fn configured_threads() -> Option<usize> {
    std::env::var("BPLAB_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `op` inside a pool capped by `BPLAB_THREADS` (or rayon's default).
pub fn with_pool<T: Send>(op: impl FnOnce() -> T + Send) -> T {
    match configured_threads() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(op))
            .unwrap_or_else(|_| panic!("could not build a pool of {n} threads")),
        None => op(),
    }
}

/// Evaluates `f(block_index, rng, len)` for each block covering `total`
/// items, in parallel, returning results in block order.
pub fn map_blocks<T, F>(seed: u64, total: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng, usize) -> T + Sync + Send,
{
    let blocks = total.div_ceil(BLOCK);
    with_pool(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let len = BLOCK.min(total - b * BLOCK);
                let mut rng = stream_rng(seed, b as u64);
                f(b, &mut rng, len)
            })
            .collect()
    })
}
