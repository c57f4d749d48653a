use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of training instances to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPartition {
    assignments: Vec<usize>,
    k: usize,
    seed: u64,
}

/// Deals a seeded uniform permutation of `0..size` round-robin into `k` folds.
pub fn make_folds(size: usize, k: usize, seed: u64) -> Result<FoldPartition> {
    if k < 2 || k > size {
        return Err(Error::param(format!(
            "fold count {} must lie in 2..={} (dataset size)",
            k, size
        )));
    }
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = vec![0; size];
    for (pos, &idx) in order.iter().enumerate() {
        assignments[idx] = pos % k;
    }
    Ok(FoldPartition { assignments, k, seed })
}

impl FoldPartition {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn fold_of(&self, i: usize) -> usize {
        self.assignments[i]
    }

    /// Indices in fold `k`, ascending.
    pub fn held_out(&self, k: usize) -> Vec<usize> {
        self.indices_where(|f| f == k)
    }

    /// Indices in every fold except `k`, ascending.
    pub fn training(&self, k: usize) -> Vec<usize> {
        self.indices_where(|f| f != k)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    fn indices_where(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| pred(f))
            .map(|(i, _)| i)
            .collect()
    }
}
