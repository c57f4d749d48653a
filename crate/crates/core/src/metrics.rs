//! Multi-label evaluation: Hamming loss, classification accuracy, macro and
//! micro F-measure, and prediction-set diagnostics.
//!
//! Every metric is computed from integer counts; a ratio of two counts is a
//! single correctly rounded division, and the macro F-measure is summed in
//! exact rational arithmetic before the one final rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::conformal::PValueTable;
use crate::error::{Error, Result};
use crate::labelset::LabelSet;
use crate::prediction::{check_delta, prediction_set};
use crate::scalar::Scalar;

fn check_lengths(truth: &[LabelSet], pred: &[LabelSet]) -> Result<()> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch(truth.len(), pred.len()));
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("metrics need at least one instance".into()));
    }
    Ok(())
}

fn ratio(num: u64, den: u64) -> f64 {
    num as f64 / den as f64
}

/// Mean of `|ψ △ ψ̂| / n` over instances.
pub fn hamming_loss(truth: &[LabelSet], pred: &[LabelSet], n: usize) -> Result<f64> {
    check_lengths(truth, pred)?;
    let wrong: u64 = truth.iter().zip(pred).map(|(t, p)| t.hamming(*p) as u64).sum();
    Ok(ratio(wrong, (truth.len() * n) as u64))
}

/// Fraction of instances whose labelset is predicted exactly.
pub fn classification_accuracy(truth: &[LabelSet], pred: &[LabelSet]) -> Result<f64> {
    check_lengths(truth, pred)?;
    let hits = truth.iter().zip(pred).filter(|(t, p)| t == p).count();
    Ok(ratio(hits as u64, truth.len() as u64))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }

    /// `(2tp, 2tp + fp + fn)`.
    fn f_parts(&self) -> (u64, u64) {
        (2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }
}

/// Per-label confusion counts.
pub fn confusion_counts(truth: &[LabelSet], pred: &[LabelSet], n: usize) -> Result<Vec<ConfusionCounts>> {
    check_lengths(truth, pred)?;
    let mut counts = vec![ConfusionCounts::default(); n];
    for (&t, &p) in truth.iter().zip(pred) {
        for (j, c) in counts.iter_mut().enumerate() {
            match (t.contains(j), p.contains(j)) {
                (true, true) => c.tp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
            }
        }
    }
    Ok(counts)
}

/// Value of `2tp / (2tp + fp + fn)` when the denominator is zero, i.e. a
/// label that is neither present nor predicted anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ZeroDivision {
    #[default]
    One,
    Zero,
}

/// `(macro, micro)` F-measure with the default 0/0 = 1 convention.
pub fn f_measures(truth: &[LabelSet], pred: &[LabelSet], n: usize) -> Result<(f64, f64)> {
    f_measures_with(truth, pred, n, ZeroDivision::One)
}

pub fn f_measures_with(truth: &[LabelSet], pred: &[LabelSet], n: usize, zero: ZeroDivision) -> Result<(f64, f64)> {
    let counts = confusion_counts(truth, pred, n)?;
    let empty = match zero {
        ZeroDivision::One => BigRational::from_integer(1.into()),
        ZeroDivision::Zero => BigRational::from_integer(0.into()),
    };
    let sum = counts.iter().fold(BigRational::from_integer(0.into()), |acc, c| {
        let (num, den) = c.f_parts();
        if den == 0 {
            acc + empty.clone()
        } else {
            acc + BigRational::new(BigInt::from(num), BigInt::from(den))
        }
    });
    let macro_f = (sum / BigRational::from_integer(BigInt::from(n)))
        .to_f64()
        .expect("F-measure is in [0, 1]");

    let pooled = counts.iter().fold(ConfusionCounts::default(), |a, &c| a.add(c));
    let (num, den) = pooled.f_parts();
    let micro_f = match (den, zero) {
        (0, ZeroDivision::One) => 1.0,
        (0, ZeroDivision::Zero) => 0.0,
        _ => ratio(num, den),
    };
    Ok((macro_f, micro_f))
}

/// Histogram bin of a prediction-set size: 0 for empty, 1 for `{1}`,
/// 2 for `{2}`, then `(2^(b-2), 2^(b-1)]` for bin `b ≥ 3`.
pub fn size_bin(size: usize) -> usize {
    if size == 0 {
        0
    } else {
        1 + (usize::BITS - (size - 1).leading_zeros()) as usize
    }
}

/// Human-readable bin label matching [`size_bin`].
pub fn bin_label(bin: usize) -> String {
    match bin {
        0 => "empty".into(),
        1 => "1".into(),
        2 => "2".into(),
        b => format!("{}-{}", (1usize << (b - 2)) + 1, 1usize << (b - 1)),
    }
}

/// Prediction-set sizes and error rate at one significance level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetReport {
    pub delta: f64,
    /// Counts per [`size_bin`]; `n + 2` bins for `n` labels.
    pub bin_counts: Vec<usize>,
    pub total: usize,
    pub errors: usize,
    pub error_rate: f64,
}

impl SetReport {
    pub fn fractions(&self) -> Vec<f64> {
        self.bin_counts.iter().map(|&c| ratio(c as u64, self.total as u64)).collect()
    }

    /// Fraction of sets with at most `size` members (including empty sets).
    pub fn fraction_at_most(&self, size: usize) -> f64 {
        let last = size_bin(size);
        debug_assert!(size <= 2 || size.is_power_of_two(), "{} is not a bin edge", size);
        let n: usize = self.bin_counts.iter().take(last + 1).sum();
        ratio(n as u64, self.total as u64)
    }
}

/// Builds the prediction set of every instance at `delta` and tallies sizes
/// and misses. An empty set always counts as an error.
pub fn set_report<F: Scalar>(tables: &[PValueTable<F>], truth: &[LabelSet], delta: F) -> Result<SetReport> {
    if tables.len() != truth.len() {
        return Err(Error::LengthMismatch(tables.len(), truth.len()));
    }
    if tables.is_empty() {
        return Err(Error::InvalidParameter("set report needs at least one instance".into()));
    }
    check_delta(delta)?;
    let n = tables[0].n_labels();
    let mut bin_counts = vec![0; n + 2];
    let mut errors = 0;
    for (table, &t) in tables.iter().zip(truth) {
        if table.n_labels() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: table.n_labels(),
            });
        }
        let set = prediction_set(table, delta)?;
        bin_counts[size_bin(set.len())] += 1;
        if !set.contains(t) {
            errors += 1;
        }
    }
    Ok(SetReport {
        delta: delta.to_f64().expect("finite"),
        bin_counts,
        total: tables.len(),
        errors,
        error_rate: ratio(errors as u64, tables.len() as u64),
    })
}
