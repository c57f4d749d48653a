use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{FoldPartition, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::mlrbf::{sigmoid_transform, train_rbf, RbfConfig, RbfModel};
use crate::persist;
use crate::scalar::Scalar;

use super::measure::{cooccurrence, labelset_scores, nonconformity, CooccurrenceMatrix, MeasureParams};
use super::pvalue::PValueTable;
use super::MAX_POWERSET_LABELS;

const CCP_FORMAT: &str = "ml-ccp-model";

/// The K underlying models of a cross-conformal predictor, before any
/// nonconformity parameters are fixed. Model `k` and co-occurrence matrix `k`
/// come from every fold except `k`.
#[derive(Debug, Clone)]
pub struct FoldModels<F> {
    pub models: Vec<RbfModel<F>>,
    pub mu: Vec<CooccurrenceMatrix>,
    pub folds: FoldPartition,
}

impl<F: Scalar> FoldModels<F> {
    /// Trains one ML-RBF per fold, in parallel. Output order is fold order.
    pub fn train(train: &MultiLabelDataset<F>, folds: &FoldPartition, config: &RbfConfig) -> Result<Self> {
        if folds.len() != train.len() {
            return Err(Error::LengthMismatch(folds.len(), train.len()));
        }
        if train.n_labels() > MAX_POWERSET_LABELS {
            return Err(Error::TooManyLabels(train.n_labels(), MAX_POWERSET_LABELS));
        }
        config.validate()?;
        let trained: Vec<(RbfModel<F>, CooccurrenceMatrix)> = (0..folds.k())
            .into_par_iter()
            .map(|k| {
                let part = train.subset(&folds.training(k));
                let model = train_rbf(&part, config)?;
                let mu = cooccurrence(part.labels(), train.n_labels())?;
                Ok((model, mu))
            })
            .collect::<Result<_>>()?;
        let (models, mu) = trained.into_iter().unzip();
        Ok(Self {
            models,
            mu,
            folds: folds.clone(),
        })
    }

    /// Scores each held-out example with its fold's model and sorts the
    /// per-fold calibration lists.
    pub fn calibrate(&self, train: &MultiLabelDataset<F>, params: MeasureParams<F>) -> Result<CcpModel<F>> {
        if self.folds.len() != train.len() {
            return Err(Error::LengthMismatch(self.folds.len(), train.len()));
        }
        let fold_calibration = (0..self.folds.k())
            .into_par_iter()
            .map(|k| {
                let mut scores = self
                    .folds
                    .held_out(k)
                    .into_iter()
                    .map(|i| {
                        let o = sigmoid_transform(&self.models[k].raw_scores(train.row(i))?);
                        nonconformity(&o, train.labelset(i), &self.mu[k], &params)
                    })
                    .collect::<Result<Vec<F>>>()?;
                scores.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
                Ok(scores)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CcpModel {
            fold_models: self.models.clone(),
            fold_calibration,
            fold_mu: self.mu.clone(),
            params,
            l: train.len(),
            n_labels: train.n_labels(),
            label_names: train.label_names().to_vec(),
        })
    }
}

/// A trained cross-conformal predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcpModel<F> {
    fold_models: Vec<RbfModel<F>>,
    /// Ascending nonconformity scores of the examples held out from each fold.
    fold_calibration: Vec<Vec<F>>,
    fold_mu: Vec<CooccurrenceMatrix>,
    params: MeasureParams<F>,
    l: usize,
    n_labels: usize,
    label_names: Vec<String>,
}

/// Trains the K fold models and calibrates them in one step.
pub fn train_ccp<F: Scalar>(
    train: &MultiLabelDataset<F>,
    folds: &FoldPartition,
    rbf_config: &RbfConfig,
    params: MeasureParams<F>,
) -> Result<CcpModel<F>> {
    FoldModels::train(train, folds, rbf_config)?.calibrate(train, params)
}

/// Number of entries of ascending `sorted` that are `>= threshold`. Ties
/// count.
fn count_at_least<F: Scalar>(sorted: &[F], threshold: F) -> usize {
    sorted.len() - sorted.partition_point(|&c| c < threshold)
}

impl<F: Scalar> CcpModel<F> {
    pub fn k(&self) -> usize {
        self.fold_models.len()
    }

    pub fn calibration_size(&self) -> usize {
        self.l
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn n_features(&self) -> usize {
        self.fold_models[0].n_features()
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn params(&self) -> &MeasureParams<F> {
        &self.params
    }

    pub fn fold_models(&self) -> &[RbfModel<F>] {
        &self.fold_models
    }

    pub fn fold_calibration(&self) -> &[Vec<F>] {
        &self.fold_calibration
    }

    pub fn fold_mu(&self) -> &[CooccurrenceMatrix] {
        &self.fold_mu
    }

    /// P-value of every non-empty labelset for instance `x`:
    /// `p(ψ) = (Σ_k #{i ∈ S_k : α_i ≥ α^{ψ,k}} + 1) / (l + 1)`.
    pub fn p_values(&self, x: &[F]) -> Result<PValueTable<F>> {
        let size = 1usize << self.n_labels;
        let mut counts = vec![1u32; size - 1];
        for ((model, calibration), mu) in self.fold_models.iter().zip(&self.fold_calibration).zip(&self.fold_mu) {
            let o = sigmoid_transform(&model.raw_scores(x)?);
            let scores = labelset_scores(&o, mu, &self.params)?;
            for (count, &score) in counts.iter_mut().zip(&scores[1..]) {
                *count += count_at_least(calibration, score) as u32;
            }
        }
        Ok(PValueTable::from_counts_unchecked(counts, self.n_labels, self.l))
    }

    /// [`p_values`](Self::p_values) for many instances in parallel; output
    /// order follows input order.
    pub fn p_values_batch(&self, rows: &[&[F]]) -> Result<Vec<PValueTable<F>>> {
        rows.par_iter().map(|x| self.p_values(x)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        persist::to_json::<F, _>(CCP_FORMAT, self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = persist::from_json::<F, _>(CCP_FORMAT, text)?;
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Model(m.to_string()));
        let k = self.fold_models.len();
        if k < 2 || self.fold_calibration.len() != k || self.fold_mu.len() != k {
            return bad("fold counts disagree");
        }
        if self.n_labels == 0 || self.n_labels > MAX_POWERSET_LABELS || self.label_names.len() != self.n_labels {
            return bad("label count out of range");
        }
        if self.fold_calibration.iter().map(Vec::len).sum::<usize>() != self.l {
            return bad("calibration lists do not add up to the training size");
        }
        if self
            .fold_calibration
            .iter()
            .any(|c| c.windows(2).any(|w| !(w[0] <= w[1])) || c.iter().any(|&v| !(v >= F::zero())))
        {
            return bad("calibration scores must be non-negative and sorted");
        }
        let d = self.fold_models[0].n_features();
        if self
            .fold_models
            .iter()
            .any(|m| m.n_labels() != self.n_labels || m.n_features() != d)
        {
            return bad("fold models disagree on dimensions");
        }
        if self.fold_mu.iter().any(|m| m.n_labels() != self.n_labels) {
            return bad("co-occurrence matrix size mismatch");
        }
        MeasureParams::new(self.params.d, self.params.lambda).map(|_| ())
    }
}
