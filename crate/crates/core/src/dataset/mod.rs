//! Multi-label datasets: in-memory container, Mulan ARFF/XML and CSV loaders,
//! and seeded fold partitioning.

mod arff;
mod csv;
mod folds;

use std::collections::HashSet;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::labelset::{LabelSet, MAX_LABELS};
use crate::scalar::Scalar;

pub use self::arff::{load_mulan, parse_arff, parse_label_xml, ArffAttribute, ArffFile, AttributeKind};
pub use self::csv::{load_csv, write_csv};
pub use self::folds::{make_folds, FoldPartition};

/// Feature matrix plus binary label matrix.
///
/// Features are stored row-major; each row's labels are stored as a
/// [`LabelSet`]. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLabelDataset<F> {
    features: Vec<F>,
    n_features: usize,
    labels: Vec<LabelSet>,
    label_names: Vec<String>,
}

impl<F: Scalar> MultiLabelDataset<F> {
    /// Builds a dataset from a row-major feature buffer and a 0/1 label
    /// matrix given row by row.
    pub fn from_parts(
        features: Vec<F>,
        n_features: usize,
        labels: &[Vec<u8>],
        label_names: Vec<String>,
    ) -> Result<Self> {
        let n = label_names.len();
        let mut sets = Vec::with_capacity(labels.len());
        for (i, row) in labels.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "label row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
            if let Some(j) = row.iter().position(|&v| v > 1) {
                return Err(Error::InvalidLabel {
                    row: i + 1,
                    column: label_names[j].clone(),
                    value: row[j].to_string(),
                });
            }
            sets.push(LabelSet::from_indicators(row));
        }
        Self::from_labelsets(features, n_features, sets, label_names)
    }

    pub fn from_labelsets(
        features: Vec<F>,
        n_features: usize,
        labels: Vec<LabelSet>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        let n = label_names.len();
        if n == 0 {
            return Err(Error::InvalidDataset("no labels".into()));
        }
        if n > MAX_LABELS {
            return Err(Error::InvalidDataset(format!(
                "{} labels, at most {} supported",
                n, MAX_LABELS
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = label_names.iter().find(|name| !seen.insert(name.as_str())) {
            return Err(Error::InvalidDataset(format!("duplicate label name `{}`", dup)));
        }
        if n_features == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::InvalidDataset(format!(
                "{} feature values do not fill {} rows of {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if let Some(i) = labels.iter().position(|ls| !ls.fits(n)) {
            return Err(Error::InvalidDataset(format!("row {} has a label bit beyond {} labels", i, n)));
        }
        Ok(Self {
            features,
            n_features,
            labels,
            label_names,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_labels(&self) -> usize {
        self.label_names.len()
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[F]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn features(&self) -> &[F] {
        &self.features
    }

    pub fn labels(&self) -> &[LabelSet] {
        &self.labels
    }

    pub fn labelset(&self, i: usize) -> LabelSet {
        self.labels[i]
    }

    /// Label matrix entry t^j_i.
    pub fn label(&self, i: usize, j: usize) -> bool {
        self.labels[i].contains(j)
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            features,
            n_features: self.n_features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_names: self.label_names.clone(),
        }
    }
}

/// Hex SHA-256 of a file's bytes.
pub fn file_checksum(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
