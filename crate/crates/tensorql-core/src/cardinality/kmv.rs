//! k-minimum-values distinct-count sketch.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Fixed default seed so estimates are reproducible across runs.
pub const DEFAULT_KMV_SEED: u64 = 0x7e4a_51b3_9c0d_f00d;

/// Keeps the `k` smallest distinct 64-bit hash values seen so far. With `n`
/// distinct inputs the k-th minimum sits near `k / n` of the hash space,
/// which gives the estimator `(k - 1) * 2^64 / kth_min`; relative standard
/// error is about `1 / sqrt(k - 2)`. Below `k` distinct values the count is
/// exact.
#[derive(Clone, Debug)]
pub struct KmvSketch {
    k: usize,
    seed: u64,
    minima: BTreeSet<u64>,
}

impl KmvSketch {
    /// `k` must be at least 16.
    pub fn new(k: usize, seed: u64) -> Result<Self> {
        if k < 16 {
            return Err(Error::eval(format!("sketch size {k} below minimum of 16")));
        }
        Ok(KmvSketch {
            k,
            seed,
            minima: BTreeSet::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn insert_u64(&mut self, key: u64) {
        self.observe(hash_u64(self.seed, key));
    }

    pub fn insert_bytes(&mut self, key: &[u8]) {
        self.observe(hash_bytes(self.seed, key));
    }

    fn observe(&mut self, h: u64) {
        if self.minima.len() < self.k {
            self.minima.insert(h);
        } else if let Some(&max) = self.minima.iter().next_back() {
            if h < max && self.minima.insert(h) {
                self.minima.remove(&max);
            }
        }
    }

    /// Sorted minima currently held. Ascending, distinct, at most `k` values.
    pub fn minima(&self) -> Vec<u64> {
        self.minima.iter().copied().collect()
    }

    /// Merge another sketch built with the same `k` and seed.
    pub fn merge(&mut self, other: &KmvSketch) -> Result<()> {
        if self.k != other.k || self.seed != other.seed {
            return Err(Error::eval(
                "cannot merge sketches with different size or seed".to_string(),
            ));
        }
        for &h in &other.minima {
            self.observe(h);
        }
        Ok(())
    }

    /// Estimated number of distinct inserted values.
    pub fn estimate(&self) -> f64 {
        if self.minima.len() < self.k {
            return self.minima.len() as f64;
        }
        let kth = *self.minima.iter().next_back().expect("k > 0") as f64;
        // normalized position of the k-th minimum in the hash space
        let kth = kth.max(1.0);
        (self.k as f64 - 1.0) * (u64::MAX as f64 + 1.0) / kth
    }

    /// Approximate relative standard error for this sketch size.
    pub fn relative_std_error(&self) -> f64 {
        1.0 / ((self.k as f64 - 2.0).sqrt())
    }
}

fn hash_u64(seed: u64, x: u64) -> u64 {
    splitmix(x ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn hash_bytes(seed: u64, bytes: &[u8]) -> u64 {
    // FNV-1a folded through the finalizer for avalanche
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    hash_u64(seed, h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
