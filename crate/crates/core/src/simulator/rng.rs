//! Keyed random streams: every draw is addressed by `(seed, tag, a, b)` so
//! that enabling or disabling one subsystem never shifts another's numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn tag_hash(tag: &str) -> u64 {
    // FNV-1a
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn stream_seed(seed: u64, tag: &str, a: u64, b: u64) -> u64 {
    let mut h = splitmix(seed);
    h = splitmix(h ^ tag_hash(tag));
    h = splitmix(h ^ a);
    splitmix(h ^ b.rotate_left(32))
}

pub fn stream(seed: u64, tag: &str, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, tag, a, b))
}
