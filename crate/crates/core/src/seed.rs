//! Hierarchical seeds.
//!
//! A [`Seed`] is a root value plus a derivation path such as
//! `[replication, purpose, group]`. Every distinct path keys its own
//! ChaCha8 stream, so draws never depend on which thread asks for them
//! or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tag for observed-data streams.
pub const DATA: u64 = 0;
/// Purpose tag for bootstrap-resample streams.
pub const BOOTSTRAP: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Seed {
    root: u64,
    path: Vec<u64>,
}

impl Seed {
    pub fn new(root: u64) -> Self {
        Seed { root, path: Vec::new() }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Child seed with `index` appended to the path.
    pub fn derive(&self, index: u64) -> Seed {
        let mut path = Vec::with_capacity(self.path.len() + 1);
        path.extend_from_slice(&self.path);
        path.push(index);
        Seed { root: self.root, path }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key())
    }

    fn key(&self) -> [u8; 32] {
        let mut state = splitmix64(self.root ^ 0x6a09_e667_f3bc_c908);
        for (depth, &index) in self.path.iter().enumerate() {
            let salted = index.wrapping_add((depth as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            state = splitmix64(state ^ splitmix64(salted));
        }
        state = splitmix64(state ^ self.path.len() as u64);

        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        key
    }
}

impl From<u64> for Seed {
    fn from(root: u64) -> Self {
        Seed::new(root)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
