use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelset::LabelSet;
use crate::scalar::Scalar;

use super::MAX_POWERSET_LABELS;

/// P-values of every non-empty labelset for one test instance.
///
/// Stored as the integer numerators `Σ_k #{α_i ≥ α^{ψ,k}} + 1`, indexed by
/// bitmask − 1, over the common denominator `l + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PValueTable<F> {
    counts: Vec<u32>,
    n_labels: usize,
    l: usize,
    #[serde(skip)]
    _scalar: PhantomData<F>,
}

impl<F: Scalar> PValueTable<F> {
    /// Builds a table from numerators; each must lie in `1..=l+1`.
    pub fn from_counts(counts: Vec<u32>, n_labels: usize, l: usize) -> Result<Self> {
        if n_labels == 0 || n_labels > MAX_POWERSET_LABELS {
            return Err(Error::TooManyLabels(n_labels, MAX_POWERSET_LABELS));
        }
        if counts.len() != (1 << n_labels) - 1 {
            return Err(Error::DimensionMismatch {
                expected: (1 << n_labels) - 1,
                actual: counts.len(),
            });
        }
        if let Some(c) = counts.iter().find(|&&c| c == 0 || c as usize > l + 1) {
            return Err(Error::param(format!("p-value numerator {} outside 1..={}", c, l + 1)));
        }
        Ok(Self::from_counts_unchecked(counts, n_labels, l))
    }

    pub(crate) fn from_counts_unchecked(counts: Vec<u32>, n_labels: usize, l: usize) -> Self {
        Self {
            counts,
            n_labels,
            l,
            _scalar: PhantomData,
        }
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    /// Number of calibration examples; p-values are multiples of `1/(l+1)`.
    pub fn calibration_size(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Numerator of `p(labelset)`. Panics on the empty labelset or one wider
    /// than the table.
    pub fn count(&self, labelset: LabelSet) -> u32 {
        assert!(!labelset.is_empty() && labelset.fits(self.n_labels), "labelset {} not in table", labelset);
        self.counts[labelset.bits() as usize - 1]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn p(&self, labelset: LabelSet) -> F {
        self.ratio(self.count(labelset))
    }

    pub(crate) fn ratio(&self, count: u32) -> F {
        F::from_u32(count).expect("u32 fits") / F::from_count(self.l + 1)
    }

    /// `(labelset, p-value)` pairs by ascending bitmask.
    pub fn iter(&self) -> impl Iterator<Item = (LabelSet, F)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (LabelSet::from_bits(i as u64 + 1), self.ratio(c)))
    }
}
