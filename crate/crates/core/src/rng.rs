//! Seed splitting.
//!
//! One user seed feeds every randomized component. Each component draws from
//! its own ChaCha stream whose 64-bit seed is
//!
//! ```text
//! splitmix64(seed ^ splitmix64(fnv1a(component)) ^ splitmix64(index + 1))
//! ```
//!
//! so streams depend only on `(seed, component, index)` and never on the
//! order in which concurrent workers happen to run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Stream seed for the `index`-th draw of `component`.
pub fn derive_seed(seed: u64, component: &str, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(fnv1a(component)) ^ splitmix64(index.wrapping_add(1)))
}

/// Generator for the `index`-th draw of `component`.
pub fn stream(seed: u64, component: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, component, index))
}
