use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every random draw in the crate goes through this generator so seeds are
/// stable across platforms and dependency upgrades of `rand`'s `StdRng`.
pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `stream` of a seeded run.
pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
