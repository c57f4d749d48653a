use std::fmt;

use serde::{Deserialize, Serialize};

/// A subset of the label space, stored as a bitmask (bit `j` set when label
/// `j` belongs to the set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelSet(u64);

/// Widest label space a [`LabelSet`] can hold.
pub const MAX_LABELS: usize = 64;

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        LabelSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Every label of an `n`-label space.
    pub fn full(n: usize) -> Self {
        LabelSet(full_mask(n))
    }

    pub fn from_indicators<T: Copy + Into<u64>>(indicators: &[T]) -> Self {
        let bits = indicators
            .iter()
            .enumerate()
            .filter(|(_, &v)| v.into() != 0)
            .fold(0u64, |acc, (j, _)| acc | (1 << j));
        LabelSet(bits)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        LabelSet(indices.into_iter().fold(0, |acc, j| acc | (1 << j)))
    }

    pub fn contains(self, label: usize) -> bool {
        label < MAX_LABELS && self.0 >> label & 1 == 1
    }

    pub fn insert(&mut self, label: usize) {
        self.0 |= 1 << label;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Size of the symmetric difference.
    pub fn hamming(self, other: LabelSet) -> usize {
        (self.0 ^ other.0).count_ones() as usize
    }

    /// True when every bit lies below label `n`.
    pub fn fits(self, n: usize) -> bool {
        self.0 & !full_mask(n) == 0
    }

    /// Member label indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(j)
        })
    }

    pub fn names(self, label_names: &[String]) -> Vec<&str> {
        self.iter().map(|j| label_names[j].as_str()).collect()
    }

    /// Every non-empty labelset over `n` labels, by ascending bitmask.
    pub fn non_empty(n: usize) -> impl Iterator<Item = LabelSet> {
        (1..=full_mask(n)).map(LabelSet)
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, j) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", j)?;
        }
        f.write_str("}")
    }
}
