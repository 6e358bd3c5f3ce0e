//! Counter-based seed derivation.
//!
//! Every stochastic stage draws its RNG from `derive(master, stage, index)`,
//! so adding a stage never shifts the streams of the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod stage {
    pub const SPLIT: u64 = 1;
    pub const SCREEN: u64 = 2;
    pub const MH: u64 = 3;
    pub const TRAIN_X: u64 = 4;
    pub const TRAIN_Y: u64 = 5;
    pub const TEST_X: u64 = 6;
    pub const TEST_Y: u64 = 7;
    pub const CV: u64 = 8;
    pub const METHOD: u64 = 9;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, stage: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stage) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_streams_differ() {
        let a = derive(7, stage::SPLIT, 0);
        assert_ne!(a, derive(7, stage::SPLIT, 1));
        assert_ne!(a, derive(7, stage::MH, 0));
        assert_ne!(a, derive(8, stage::SPLIT, 0));
        assert_eq!(a, derive(7, stage::SPLIT, 0));
    }
}
