use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelset::{full_mask, LabelSet};
use crate::scalar::Scalar;

use super::MAX_POWERSET_LABELS;

/// Exponent `d` on per-label distances and penalty `lambda` per unseen
/// label pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams<F> {
    pub d: F,
    pub lambda: F,
}

impl<F: Scalar> MeasureParams<F> {
    pub fn new(d: F, lambda: F) -> Result<Self> {
        if !(d > F::zero() && d.is_finite()) {
            return Err(Error::param(format!("exponent d = {} must be positive", d)));
        }
        if !(lambda >= F::zero() && lambda.is_finite()) {
            return Err(Error::param(format!("lambda = {} must be non-negative", lambda)));
        }
        Ok(Self { d, lambda })
    }
}

/// Which label pairs were never observed together.
///
/// Row `j` is a bitmask whose bit `r` is set when labels `j` and `r` never
/// appear in the same labelset. Symmetric with an empty diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    rows: Vec<u64>,
}

impl CooccurrenceMatrix {
    /// Builds from explicit rows, checking symmetry and the diagonal.
    pub fn from_rows(rows: Vec<u64>) -> Result<Self> {
        let n = rows.len();
        for (j, &row) in rows.iter().enumerate() {
            if row & !full_mask(n) != 0 || row >> j & 1 == 1 {
                return Err(Error::param(format!("co-occurrence row {} is out of range or sets the diagonal", j)));
            }
            for r in 0..n {
                if (row >> r & 1) != (rows[r] >> j & 1) {
                    return Err(Error::param("co-occurrence matrix must be symmetric"));
                }
            }
        }
        Ok(Self { rows })
    }

    /// Every pair counts as observed.
    pub fn all_seen(n: usize) -> Self {
        Self { rows: vec![0; n] }
    }

    /// No pair was ever observed.
    pub fn none_seen(n: usize) -> Self {
        let full = full_mask(n);
        Self {
            rows: (0..n).map(|j| full & !(1 << j)).collect(),
        }
    }

    pub fn n_labels(&self) -> usize {
        self.rows.len()
    }

    /// μ_{j,r}: true when the pair was never observed together.
    pub fn unseen(&self, j: usize, r: usize) -> bool {
        self.rows[j] >> r & 1 == 1
    }

    pub fn row_mask(&self, j: usize) -> u64 {
        self.rows[j]
    }
}

/// Marks every pair of labels that never share a labelset in `labels`.
pub fn cooccurrence(labels: &[LabelSet], n: usize) -> Result<CooccurrenceMatrix> {
    if labels.is_empty() {
        return Err(Error::InvalidDataset("co-occurrence needs at least one row".into()));
    }
    let mut seen_with = vec![0u64; n];
    for &ls in labels {
        for j in ls.iter() {
            seen_with[j] |= ls.bits();
        }
    }
    let full = full_mask(n);
    Ok(CooccurrenceMatrix {
        rows: seen_with
            .iter()
            .enumerate()
            .map(|(j, &seen)| full & !seen & !(1 << j))
            .collect(),
    })
}

fn check_inputs<F: Scalar>(transformed: &[F], mu: &CooccurrenceMatrix) -> Result<()> {
    if transformed.len() != mu.n_labels() {
        return Err(Error::DimensionMismatch {
            expected: mu.n_labels(),
            actual: transformed.len(),
        });
    }
    Ok(())
}

/// Nonconformity of assigning `labelset` to an instance whose transformed
/// outputs are `transformed`:
///
/// `Σ_j |t_j − o_j|^d + λ · #{j < r : j, r ∈ labelset, μ_{j,r} = 1}`
///
/// Evaluated term by term; [`labelset_scores`] produces bit-identical values
/// for every labelset at once.
pub fn nonconformity<F: Scalar>(
    transformed: &[F],
    labelset: LabelSet,
    mu: &CooccurrenceMatrix,
    params: &MeasureParams<F>,
) -> Result<F> {
    check_inputs(transformed, mu)?;
    let n = transformed.len();
    if !labelset.fits(n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: 64 - labelset.bits().leading_zeros() as usize,
        });
    }
    let mut distance = F::zero();
    for (j, &o) in transformed.iter().enumerate() {
        let t = if labelset.contains(j) { F::one() } else { F::zero() };
        distance = distance + (t - o).abs().powf(params.d);
    }
    let mut unseen = 0usize;
    for j in 0..n {
        for r in j + 1..n {
            if labelset.contains(j) && labelset.contains(r) && mu.unseen(j, r) {
                unseen += 1;
            }
        }
    }
    Ok(distance + params.lambda * F::from_count(unseen))
}

/// Nonconformity of every labelset over `n` labels, indexed by bitmask
/// (entry 0 is the empty labelset).
///
/// The table is grown one label at a time: after label `j` the first
/// `2^(j+1)` entries hold the partial sums over labels `0..=j`, each built
/// from its parent entry by one addition. That reproduces the left-to-right
/// summation of [`nonconformity`] exactly, so both routes agree to the bit.
/// Unseen-pair counts grow the same way with one popcount per entry.
pub fn labelset_scores<F: Scalar>(
    transformed: &[F],
    mu: &CooccurrenceMatrix,
    params: &MeasureParams<F>,
) -> Result<Vec<F>> {
    check_inputs(transformed, mu)?;
    let n = transformed.len();
    if n > MAX_POWERSET_LABELS {
        return Err(Error::TooManyLabels(n, MAX_POWERSET_LABELS));
    }
    let size = 1usize << n;
    let mut sums = vec![F::zero(); size];
    let mut pairs = vec![0u32; size];
    for (j, &o) in transformed.iter().enumerate() {
        let inside = (F::one() - o).abs().powf(params.d);
        let outside = (F::zero() - o).abs().powf(params.d);
        let bit = 1usize << j;
        let row = mu.row_mask(j);
        for m in 0..bit {
            let s = sums[m];
            sums[m | bit] = s + inside;
            sums[m] = s + outside;
            pairs[m | bit] = pairs[m] + (row & m as u64).count_ones();
        }
    }
    Ok(sums
        .into_iter()
        .zip(pairs)
        .map(|(s, p)| s + params.lambda * F::from_count(p as usize))
        .collect())
}
