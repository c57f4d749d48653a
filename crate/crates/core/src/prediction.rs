//! The two ways of reading a p-value table: a forced prediction with
//! confidence and credibility, or a prediction set at significance `delta`.

use serde::Serialize;

use crate::conformal::PValueTable;
use crate::error::{Error, Result};
use crate::labelset::LabelSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcedPrediction<F> {
    pub labelset: LabelSet,
    /// One minus the largest p-value among the other labelsets.
    pub confidence: F,
    /// The largest p-value.
    pub credibility: F,
}

/// Labelset with the highest p-value, ties going to the smallest bitmask.
///
/// The runner-up is taken over every other labelset, so when two labelsets
/// share the top p-value the confidence is `1 − credibility`. With a single
/// labelset there is no runner-up and confidence is 1.
pub fn forced<F: Scalar>(table: &PValueTable<F>) -> ForcedPrediction<F> {
    let counts = table.counts();
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    let runner_up = counts
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &c)| c)
        .max();
    ForcedPrediction {
        labelset: LabelSet::from_bits(best as u64 + 1),
        confidence: runner_up.map_or(F::one(), |c| F::one() - table.ratio(c)),
        credibility: table.ratio(counts[best]),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet<F> {
    /// Ascending by bitmask.
    pub members: Vec<LabelSet>,
    pub delta: F,
}

impl<F> PredictionSet<F> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, labelset: LabelSet) -> bool {
        self.members.binary_search(&labelset).is_ok()
    }
}

pub(crate) fn check_delta<F: Scalar>(delta: F) -> Result<()> {
    if delta > F::zero() && delta < F::one() {
        Ok(())
    } else {
        Err(Error::param(format!("significance level {} must lie in (0, 1)", delta)))
    }
}

/// `{ψ : p(ψ) > delta}`; may be empty.
pub fn prediction_set<F: Scalar>(table: &PValueTable<F>, delta: F) -> Result<PredictionSet<F>> {
    check_delta(delta)?;
    Ok(PredictionSet {
        members: table.iter().filter(|&(_, p)| p > delta).map(|(ls, _)| ls).collect(),
        delta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcedRecord<F> {
    pub labels: Vec<String>,
    pub confidence: F,
    pub credibility: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetRecord<F> {
    pub delta: F,
    pub members: Vec<Vec<String>>,
    pub size: usize,
}

fn owned_names(ls: LabelSet, names: &[String]) -> Vec<String> {
    ls.names(names).into_iter().map(str::to_string).collect()
}

impl<F: Scalar> ForcedPrediction<F> {
    pub fn to_record(&self, label_names: &[String]) -> ForcedRecord<F> {
        ForcedRecord {
            labels: owned_names(self.labelset, label_names),
            confidence: self.confidence,
            credibility: self.credibility,
        }
    }
}

impl<F: Scalar> PredictionSet<F> {
    /// JSON-ready form; `limit` caps how many members are listed while
    /// `size` always reports the full count.
    pub fn to_record(&self, label_names: &[String], limit: Option<usize>) -> SetRecord<F> {
        let shown = limit.unwrap_or(usize::MAX).min(self.members.len());
        SetRecord {
            delta: self.delta,
            members: self.members[..shown].iter().map(|&ls| owned_names(ls, label_names)).collect(),
            size: self.members.len(),
        }
    }
}
