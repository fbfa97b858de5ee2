//! Counter-based random streams.
//!
//! A seed fixes a ChaCha8 key; stream `i` is the ChaCha stream with id `i`
//! at word position 0. Window `w` of a simulation always draws from stream
//! `w`, so results do not depend on how windows are split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct StreamSeed {
    seed: u64,
    keyed: ChaCha8Rng,
}

impl StreamSeed {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            keyed: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent key for a sub-task (bootstrap, scan point, ...).
    pub fn derive(&self, label: u64) -> Self {
        Self::new(splitmix64(self.seed ^ splitmix64(label.wrapping_add(0x5851_F42D_4C95_7F2D))))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.keyed.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
