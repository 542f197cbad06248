//! The fixed MiniRocket kernel set: every length-9 kernel with weight −1
//! everywhere except three positions of weight +2.

use itertools::Itertools;
use sha2::{Digest, Sha256};

pub const KERNEL_LEN: usize = 9;
pub const N_KERNELS: usize = 84;

/// The 84 kernels as the positions of their +2 weights, lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSet {
    indices: Vec<[usize; 3]>,
}

impl Default for KernelSet {
    fn default() -> Self {
        Self::canonical()
    }
}

impl KernelSet {
    pub fn canonical() -> Self {
        let indices = (0..KERNEL_LEN)
            .combinations(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        Self { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[[usize; 3]] {
        &self.indices
    }

    pub fn weights(&self, kernel: usize) -> [f64; KERNEL_LEN] {
        let mut w = [-1.0; KERNEL_LEN];
        for &i in &self.indices[kernel] {
            w[i] = 2.0;
        }
        w
    }

    /// SHA-256 over the weights, hex encoded; pins the set in serialized models.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for k in 0..self.len() {
            for w in self.weights(k) {
                h.update(w.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}
