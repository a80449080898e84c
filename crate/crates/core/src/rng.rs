//! Named random streams derived from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

/// Splits a master seed into independent, named generator streams.
///
/// `SeedStreams::new(7).stream("init")` always yields the same generator,
/// and its output does not change when other streams are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStreams {
    master: u64,
}

impl SeedStreams {
    pub const DATA: &'static str = "data";
    pub const INIT: &'static str = "init";
    pub const AUGMENT: &'static str = "augment";
    pub const LATENT: &'static str = "latent";

    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Derived 64-bit seed for a named stream.
    pub fn seed_for(&self, name: &str) -> u64 {
        let mut h = Sha256::new();
        h.update(self.master.to_le_bytes());
        h.update(name.as_bytes());
        let digest = h.finalize();
        let mut b = [0u8; 8];
        b.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(b)
    }

    pub fn stream(&self, name: &str) -> Rng {
        Rng::seed_from_u64(self.seed_for(name))
    }
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn streams_are_stable_and_distinct() {
        let s = SeedStreams::new(42);
        let a: u64 = s.stream("init").random();
        let b: u64 = s.stream("init").random();
        let c: u64 = s.stream("data").random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(s.seed_for("init"), SeedStreams::new(43).seed_for("init"));
    }
}
