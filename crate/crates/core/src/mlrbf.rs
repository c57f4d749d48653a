//! Multi-label RBF network (ML-RBF).
//!
//! For each label, k-means over that label's positive instances places
//! `ceil(fraction · #positives)` prototypes. All prototypes share one Gaussian
//! width, `scaling` times the mean pairwise prototype distance. The output
//! layer maps prototype activations plus a bias to one score per label and is
//! fitted by ridge least squares against ±1 targets, so a score above zero
//! means "label present".

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::MultiLabelDataset;
use crate::error::{Error, Result};
use crate::kmeans::kmeans;
use crate::labelset::LabelSet;
use crate::linalg::{ridge_least_squares, Matrix};
use crate::persist;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfConfig {
    /// Prototypes per label as a fraction of that label's positive count.
    pub fraction: f64,
    /// Multiplier on the mean inter-prototype distance giving the kernel width.
    pub scaling: f64,
    pub kmeans_iters: usize,
    pub seed: u64,
    pub ridge: f64,
    /// Z-score features with statistics of the model's own training data.
    pub standardize: bool,
}

impl Default for RbfConfig {
    fn default() -> Self {
        Self {
            fraction: 0.01,
            scaling: 1.0,
            kmeans_iters: 100,
            seed: 0,
            ridge: 1e-8,
            standardize: false,
        }
    }
}

impl RbfConfig {
    pub fn with_fraction(mut self, fraction: f64) -> Self {
        self.fraction = fraction;
        self
    }

    pub fn with_scaling(mut self, scaling: f64) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn with_ridge(mut self, ridge: f64) -> Self {
        self.ridge = ridge;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::param(format!("fraction {} must lie in (0, 1]", self.fraction)));
        }
        if !(self.scaling > 0.0 && self.scaling.is_finite()) {
            return Err(Error::param(format!("scaling {} must be positive", self.scaling)));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::param(format!("ridge {} must be non-negative", self.ridge)));
        }
        if self.kmeans_iters == 0 {
            return Err(Error::param("kmeans_iters must be positive"));
        }
        Ok(())
    }

    /// Prototype count for a label with `positives` positive instances.
    pub fn clusters_for(&self, positives: usize) -> usize {
        if positives == 0 {
            return 0;
        }
        let raw = self.fraction * positives as f64;
        // 0.07 * 100 is 7.000000000000001 in binary; don't let that become 8
        let k = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
        (k as usize).clamp(1, positives)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Standardizer<F> {
    mean: Vec<F>,
    scale: Vec<F>,
}

impl<F: Scalar> Standardizer<F> {
    fn fit(data: &MultiLabelDataset<F>) -> Self {
        let n = F::from_count(data.len());
        let d = data.n_features();
        let mut mean = vec![F::zero(); d];
        for row in data.rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m = *m + v;
            }
        }
        mean.iter_mut().for_each(|m| *m = *m / n);
        let mut var = vec![F::zero(); d];
        for row in data.rows() {
            for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                *s = *s + (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > F::zero() {
                    sd
                } else {
                    F::one()
                }
            })
            .collect();
        Self { mean, scale }
    }

    fn apply(&self, x: &[F]) -> Vec<F> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect()
    }
}

/// Trained ML-RBF network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfModel<F> {
    centers: Matrix<F>,
    width: F,
    /// (M + 1) × n; the last row is the bias.
    weights: Matrix<F>,
    n_labels: usize,
    d_feat: usize,
    standardizer: Option<Standardizer<F>>,
    warnings: Vec<String>,
}

const RBF_FORMAT: &str = "ml-rbf-model";

/// Trains an ML-RBF network on `train`.
pub fn train_rbf<F: Scalar>(train: &MultiLabelDataset<F>, config: &RbfConfig) -> Result<RbfModel<F>> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::InvalidDataset("empty training set".into()));
    }
    let standardizer = config.standardize.then(|| Standardizer::fit(train));
    let rows: Vec<Vec<F>> = match &standardizer {
        Some(s) => train.rows().map(|r| s.apply(r)).collect(),
        None => train.rows().map(<[F]>::to_vec).collect(),
    };

    let d_feat = train.n_features();
    let n_labels = train.n_labels();
    let mut centers: Vec<Vec<F>> = Vec::new();
    let mut warnings = Vec::new();
    for j in 0..n_labels {
        let positives: Vec<&[F]> = rows
            .iter()
            .zip(train.labels())
            .filter(|(_, ls)| ls.contains(j))
            .map(|(r, _)| r.as_slice())
            .collect();
        if positives.is_empty() {
            let msg = format!("label `{}` has no positive training instances", train.label_names()[j]);
            log::warn!("{}", msg);
            warnings.push(msg);
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(j as u64);
        let k = config.clusters_for(positives.len());
        centers.extend(kmeans(&positives, k, config.kmeans_iters, &mut rng));
    }
    if centers.is_empty() {
        return Err(Error::NoPrototypes);
    }

    let width = F::lit(config.scaling) * mean_pairwise_distance(&centers);
    let m = centers.len();
    let centers = Matrix::from_vec(m, d_feat, centers.concat())?;

    let mut design = Matrix::zeros(rows.len(), m + 1);
    let mut targets = Matrix::zeros(rows.len(), n_labels);
    for (i, row) in rows.iter().enumerate() {
        for (c, a) in activations(&centers, width, row).into_iter().enumerate() {
            design[(i, c)] = a;
        }
        design[(i, m)] = F::one();
        for j in 0..n_labels {
            targets[(i, j)] = if train.label(i, j) { F::one() } else { -F::one() };
        }
    }
    let weights = ridge_least_squares(&design, &targets, F::lit(config.ridge))?;

    Ok(RbfModel {
        centers,
        width,
        weights,
        n_labels,
        d_feat,
        standardizer,
        warnings,
    })
}

/// Mean Euclidean distance over all unordered center pairs; 1 when there is
/// no pair or every center coincides.
fn mean_pairwise_distance<F: Scalar>(centers: &[Vec<F>]) -> F {
    let m = centers.len();
    if m < 2 {
        return F::one();
    }
    let mut total = F::zero();
    for a in 0..m {
        for b in a + 1..m {
            total = total
                + centers[a]
                    .iter()
                    .zip(&centers[b])
                    .map(|(&x, &y)| (x - y) * (x - y))
                    .sum::<F>()
                    .sqrt();
        }
    }
    let mean = total / F::from_count(m * (m - 1) / 2);
    if mean > F::zero() {
        mean
    } else {
        F::one()
    }
}

fn activations<F: Scalar>(centers: &Matrix<F>, width: F, x: &[F]) -> Vec<F> {
    let denom = F::lit(2.0) * width * width;
    (0..centers.rows())
        .map(|c| {
            let d2: F = centers.row(c).iter().zip(x).map(|(&a, &b)| (a - b) * (a - b)).sum();
            (-d2 / denom).exp()
        })
        .collect()
}

impl<F: Scalar> RbfModel<F> {
    /// Assembles a model from explicit parameters. `weights` must have one
    /// row per center plus a trailing bias row.
    pub fn from_parameters(centers: Matrix<F>, width: F, weights: Matrix<F>) -> Result<Self> {
        if !(width > F::zero()) {
            return Err(Error::param("kernel width must be positive"));
        }
        if weights.rows() != centers.rows() + 1 {
            return Err(Error::DimensionMismatch {
                expected: centers.rows() + 1,
                actual: weights.rows(),
            });
        }
        Ok(Self {
            d_feat: centers.cols(),
            n_labels: weights.cols(),
            centers,
            width,
            weights,
            standardizer: None,
            warnings: Vec::new(),
        })
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn n_features(&self) -> usize {
        self.d_feat
    }

    pub fn centers(&self) -> &Matrix<F> {
        &self.centers
    }

    pub fn width(&self) -> F {
        self.width
    }

    pub fn weights(&self) -> &Matrix<F> {
        &self.weights
    }

    /// Training-time warnings, e.g. labels without positive instances.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn check_dim(&self, x: &[F]) -> Result<()> {
        if x.len() != self.d_feat {
            return Err(Error::DimensionMismatch {
                expected: self.d_feat,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Hidden-layer activations followed by the constant bias input.
    pub fn hidden(&self, x: &[F]) -> Result<Vec<F>> {
        self.check_dim(x)?;
        let mut h = match &self.standardizer {
            Some(s) => activations(&self.centers, self.width, &s.apply(x)),
            None => activations(&self.centers, self.width, x),
        };
        h.push(F::one());
        Ok(h)
    }

    /// One real score per label; positive means the label is predicted.
    pub fn raw_scores(&self, x: &[F]) -> Result<Vec<F>> {
        Ok(self.weights.left_mul(&self.hidden(x)?))
    }

    pub fn native_prediction(&self, x: &[F]) -> Result<LabelSet> {
        self.raw_scores(x).map(|s| threshold(&s, F::zero()))
    }

    pub fn to_json(&self) -> Result<String> {
        persist::to_json::<F, _>(RBF_FORMAT, self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        persist::from_json::<F, _>(RBF_FORMAT, text)
    }
}

/// Labels whose score is strictly above `cut`.
pub fn threshold<F: Scalar>(scores: &[F], cut: F) -> LabelSet {
    LabelSet::from_indices(scores.iter().enumerate().filter(|(_, &s)| s > cut).map(|(j, _)| j))
}

pub fn native_prediction<F: Scalar>(model: &RbfModel<F>, x: &[F]) -> Result<LabelSet> {
    model.native_prediction(x)
}

/// Elementwise logistic sigmoid `1 / (1 + e^(-x))`.
pub fn sigmoid_transform<F: Scalar>(scores: &[F]) -> Vec<F> {
    scores.iter().map(|&x| sigmoid(x)).collect()
}

pub fn sigmoid<F: Scalar>(x: F) -> F {
    F::one() / (F::one() + (-x).exp())
}
