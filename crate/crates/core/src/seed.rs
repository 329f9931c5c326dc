//! Seed handling. Every generator draws from a ChaCha8 stream selected by
//! `(seed, stream id)`, so independent consumers never share state and a
//! round can be replayed from its seed alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

/// Stream ids used inside one simulation round.
pub mod streams {
    pub const RELATIVE_PRICES: u64 = 1;
    pub const PRICE_TEMPLATE: u64 = 2;
    pub const SIGNS: u64 = 3;
    pub const CANCELATION: u64 = 4;
}

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        self.stream(0)
    }

    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }

    /// Seed of round `k` in an experiment: `base ^ splitmix64(k)`.
    pub fn derive(self, k: u64) -> RngSeed {
        RngSeed(self.0 ^ splitmix64(k))
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
