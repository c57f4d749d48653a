//! Cross-conformal prediction over the labelset powerset.
//!
//! [`measure`] holds the nonconformity measure and its exact fast path over
//! all labelsets, [`ccp`] the K-fold training and calibration, and
//! [`pvalue`] the per-instance p-value tables.

pub mod ccp;
pub mod measure;
pub mod pvalue;

pub use self::ccp::{train_ccp, CcpModel, FoldModels};
pub use self::measure::{cooccurrence, labelset_scores, nonconformity, CooccurrenceMatrix, MeasureParams};
pub use self::pvalue::PValueTable;

/// Largest label count for which the powerset is enumerated.
pub const MAX_POWERSET_LABELS: usize = 20;
