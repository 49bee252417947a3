//! Counter-based seed derivation.
//!
//! Every random stream is addressed by a path of indices hashed from a master
//! seed, so a stream's contents never depend on evaluation order or thread count:
//!
//! * grid point seed = `derive_seed(master, grid_index)`
//! * trial seed      = `derive_seed(point_seed, trial_index)`
//! * noise sample    = `derive_seed(derive_seed(noise_seed, user), t)`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` under `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_mul(GOLDEN_GAMMA) ^ 0x5EED))
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
