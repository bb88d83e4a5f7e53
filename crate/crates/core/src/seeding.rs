//! Per-trial seed derivation from a single master seed.
//!
//! Seeds come from a SplitMix64 mix of `(master, stream, index)`, so any trial
//! can be regenerated on its own and parallel runs see exactly the same
//! per-trial random streams as serial ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` of the named `stream` under `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ stream.wrapping_mul(GOLDEN));
    splitmix64(b ^ index)
}

/// Stable stream id for a label, so call sites can name their streams.
pub fn stream_id(label: &str) -> u64 {
    // FNV-1a
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(master, stream, index))
}
