//! Cross-conformal prediction (CCP) for multi-label classification.
//!
//! The crate wraps a multi-label RBF network (ML-RBF) in a K-fold
//! cross-conformal predictor. For every test instance it produces a p-value
//! for each non-empty labelset, which can be turned into a forced prediction
//! (with confidence and credibility) or into a prediction set at a chosen
//! significance level.
//!
//! The numeric core is generic over the scalar type (see [`Scalar`]); the
//! aliases at the crate root pin it to `f64`, with `*32` variants for `f32`.
//!
//! ```
//! use mlccp::{make_folds, train_ccp, MeasureParams, MultiLabelDataset, RbfConfig};
//! use mlccp::prediction::forced;
//!
//! let features = vec![0.0, 0.1, 0.2, 5.0, 5.1, 5.2];
//! let labels = vec![vec![1u8, 0], vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1]];
//! let data = MultiLabelDataset::from_parts(
//!     features, 1, &labels, vec!["a".into(), "b".into()],
//! ).unwrap();
//!
//! let folds = make_folds(data.len(), 3, 7).unwrap();
//! let params = MeasureParams::new(4.0, 1.0).unwrap();
//! let model = train_ccp(&data, &folds, &RbfConfig::default().with_fraction(1.0), params).unwrap();
//! let table = model.p_values(&[0.05]).unwrap();
//! let prediction = forced(&table);
//! assert_eq!(prediction.labelset.bits(), 0b01);
//! ```

pub mod conformal;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod kmeans;
pub mod labelset;
pub mod linalg;
pub mod metrics;
pub mod mlrbf;
mod persist;
pub mod prediction;
pub mod scalar;
pub mod synthetic;

pub use conformal::{cooccurrence, labelset_scores, nonconformity, train_ccp, CooccurrenceMatrix, MAX_POWERSET_LABELS};
pub use dataset::{load_csv, load_mulan, make_folds, FoldPartition};
pub use error::{Error, Result};
pub use labelset::LabelSet;
pub use mlrbf::{native_prediction, sigmoid_transform, train_rbf, RbfConfig};
pub use scalar::Scalar;

/// Multi-label dataset with `f64` features.
pub type MultiLabelDataset = dataset::MultiLabelDataset<f64>;
/// Multi-label dataset with `f32` features.
pub type MultiLabelDataset32 = dataset::MultiLabelDataset<f32>;

/// Trained ML-RBF network over `f64`.
pub type RbfModel = mlrbf::RbfModel<f64>;
/// Trained ML-RBF network over `f32`.
pub type RbfModel32 = mlrbf::RbfModel<f32>;

/// Nonconformity measure parameters over `f64`.
pub type MeasureParams = conformal::MeasureParams<f64>;
/// Nonconformity measure parameters over `f32`.
pub type MeasureParams32 = conformal::MeasureParams<f32>;

/// Cross-conformal model over `f64`.
pub type CcpModel = conformal::CcpModel<f64>;
/// Cross-conformal model over `f32`.
pub type CcpModel32 = conformal::CcpModel<f32>;

/// P-value table over `f64`.
pub type PValueTable = conformal::PValueTable<f64>;
/// P-value table over `f32`.
pub type PValueTable32 = conformal::PValueTable<f32>;
