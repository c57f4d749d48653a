//! End-to-end experiment: train the cross-conformal predictor on one
//! dataset, evaluate forced and native predictions plus prediction sets on
//! another, and write the reports.
//!
//! Reports contain no timestamps or host details; for a fixed configuration
//! they are byte-identical regardless of thread count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{FoldModels, MeasureParams, PValueTable};
use crate::dataset::{file_checksum, load_csv, load_mulan, make_folds, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::labelset::LabelSet;
use crate::metrics::{bin_label, classification_accuracy, f_measures, hamming_loss, set_report, SetReport};
use crate::mlrbf::{train_rbf, RbfConfig};
use crate::prediction::forced;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum DataSource {
    Mulan { arff: PathBuf, xml: PathBuf },
    Csv { features: PathBuf, labels: PathBuf },
}

impl DataSource {
    pub fn load(&self) -> Result<MultiLabelDataset<f64>> {
        match self {
            DataSource::Mulan { arff, xml } => load_mulan(arff, xml),
            DataSource::Csv { features, labels } => load_csv(features, labels),
        }
    }

    fn files(&self) -> [&Path; 2] {
        match self {
            DataSource::Mulan { arff, xml } => [arff, xml],
            DataSource::Csv { features, labels } => [features, labels],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldRule {
    /// About 100 training instances per fold: `round(l / 100)`, at least 2.
    Auto,
    Fixed(usize),
}

impl FoldRule {
    pub fn resolve(self, l: usize) -> usize {
        match self {
            FoldRule::Auto => auto_folds(l),
            FoldRule::Fixed(k) => k,
        }
    }
}

/// `round(l / 100)` with halves rounding up, never below 2.
pub fn auto_folds(l: usize) -> usize {
    ((l + 50) / 100).max(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub train: DataSource,
    pub test: DataSource,
    pub folds: FoldRule,
    pub d: f64,
    /// One CCP evaluation per value; the fold models are shared.
    pub lambdas: Vec<f64>,
    pub rbf: RbfConfig,
    pub seed: u64,
    pub confidence_levels: Vec<f64>,
    #[serde(skip)]
    pub formats: Vec<ReportFormat>,
    #[serde(skip)]
    pub save_models: bool,
    /// Worker threads; `None` uses rayon's default. Never affects results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(train: DataSource, test: DataSource) -> Self {
        Self {
            train,
            test,
            folds: FoldRule::Auto,
            d: 4.0,
            lambdas: vec![0.0, 1.0],
            rbf: RbfConfig::default(),
            seed: 0,
            confidence_levels: vec![0.95, 0.9, 0.8],
            formats: vec![ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text],
            save_models: true,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rbf.validate()?;
        MeasureParams::new(self.d, 0.0)?;
        if self.lambdas.is_empty() {
            return Err(Error::param("at least one lambda is required"));
        }
        for &lambda in &self.lambdas {
            MeasureParams::new(self.d, lambda)?;
        }
        if let Some(c) = self.confidence_levels.iter().find(|&&c| !(c > 0.0 && c < 1.0)) {
            return Err(Error::param(format!("confidence level {} must lie in (0, 1)", c)));
        }
        if let FoldRule::Fixed(k) = self.folds {
            if k < 2 {
                return Err(Error::param(format!("fold count {} must be at least 2", k)));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::param("thread count must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricRow {
    pub hamming_loss: f64,
    pub accuracy: f64,
    pub f_macro: f64,
    pub f_micro: f64,
}

impl MetricRow {
    pub fn compute(truth: &[LabelSet], pred: &[LabelSet], n: usize) -> Result<Self> {
        let (f_macro, f_micro) = f_measures(truth, pred, n)?;
        Ok(Self {
            hamming_loss: hamming_loss(truth, pred, n)?,
            accuracy: classification_accuracy(truth, pred)?,
            f_macro,
            f_micro,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub source: DataSource,
    pub sha256: Vec<String>,
    pub rows: usize,
    pub features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceReport {
    pub confidence: f64,
    #[serde(flatten)]
    pub report: SetReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcpRun {
    pub lambda: f64,
    pub forced: MetricRow,
    pub mean_confidence: f64,
    pub mean_credibility: f64,
    pub sets: Vec<ConfidenceReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub config: ExperimentConfig,
    pub train: DatasetInfo,
    pub test: DatasetInfo,
    pub label_names: Vec<String>,
    pub folds: usize,
    pub warnings: Vec<String>,
    pub native: MetricRow,
    pub ccp: Vec<CcpRun>,
    pub reference: Option<ReferenceValues>,
}

impl ExperimentReport {
    pub fn run_for(&self, lambda: f64) -> Option<&CcpRun> {
        self.ccp.iter().find(|r| r.lambda == lambda)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Runs the experiment and, when `out_dir` is given, writes the requested
/// report formats (and model files) there.
pub fn run_experiment(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    config.validate()?;
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::param(e.to_string()))?
            .install(|| run_inner(config, out_dir)),
        None => run_inner(config, out_dir),
    }
}

fn describe(source: &DataSource, data: &MultiLabelDataset<f64>) -> Result<DatasetInfo> {
    Ok(DatasetInfo {
        source: source.clone(),
        sha256: source.files().iter().map(|p| file_checksum(p)).collect::<Result<_>>()?,
        rows: data.len(),
        features: data.n_features(),
    })
}

fn run_inner(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    let train = config.train.load()?;
    let test = config.test.load()?;
    if train.label_names() != test.label_names() {
        return Err(Error::InvalidDataset("training and test label names differ".into()));
    }
    if train.n_features() != test.n_features() {
        return Err(Error::DimensionMismatch {
            expected: train.n_features(),
            actual: test.n_features(),
        });
    }
    let n = train.n_labels();
    let k = config.folds.resolve(train.len());
    let folds = make_folds(train.len(), k, config.seed)?;
    let rbf = RbfConfig {
        seed: config.seed,
        ..config.rbf.clone()
    };
    log::info!("training {} fold models on {} instances", k, train.len());
    let fold_models = FoldModels::train(&train, &folds, &rbf)?;
    let native_model = train_rbf(&train, &rbf)?;

    let rows: Vec<&[f64]> = test.rows().collect();
    let truth = test.labels();
    let native_pred: Vec<LabelSet> = rows
        .par_iter()
        .map(|x| native_model.native_prediction(x))
        .collect::<Result<_>>()?;
    let native = MetricRow::compute(truth, &native_pred, n)?;

    let mut warnings: Vec<String> = native_model.warnings().to_vec();
    for (i, m) in fold_models.models.iter().enumerate() {
        warnings.extend(m.warnings().iter().map(|w| format!("fold {}: {}", i, w)));
    }

    let mut ccp = Vec::new();
    for &lambda in &config.lambdas {
        let params = MeasureParams::new(config.d, lambda)?;
        let model = fold_models.calibrate(&train, params)?;
        log::info!("computing p-values for {} test instances, lambda = {}", rows.len(), lambda);
        let tables: Vec<PValueTable<f64>> = model.p_values_batch(&rows)?;
        let predictions: Vec<_> = tables.iter().map(forced).collect();
        let pred: Vec<LabelSet> = predictions.iter().map(|p| p.labelset).collect();
        let g = predictions.len() as f64;
        let sets = config
            .confidence_levels
            .iter()
            .map(|&c| {
                Ok(ConfidenceReport {
                    confidence: c,
                    report: set_report(&tables, truth, 1.0 - c)?,
                })
            })
            .collect::<Result<_>>()?;
        ccp.push(CcpRun {
            lambda,
            forced: MetricRow::compute(truth, &pred, n)?,
            mean_confidence: predictions.iter().map(|p| p.confidence).sum::<f64>() / g,
            mean_credibility: predictions.iter().map(|p| p.credibility).sum::<f64>() / g,
            sets,
        });
        if let Some(dir) = out_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            if config.save_models {
                write(&dir.join(format!("model_lambda{}.json", lambda)), &model.to_json()?)?;
            }
            if config.formats.contains(&ReportFormat::Csv) {
                let mut text = String::from("instance,labels,confidence,credibility,truth\n");
                for (i, (p, t)) in predictions.iter().zip(truth).enumerate() {
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{}",
                        i,
                        p.labelset.names(train.label_names()).join(";"),
                        p.confidence,
                        p.credibility,
                        t.names(train.label_names()).join(";")
                    );
                }
                write(&dir.join(format!("predictions_lambda{}.csv", lambda)), &text)?;
            }
        }
    }

    let report = ExperimentReport {
        tool: format!("mlccp {}", env!("CARGO_PKG_VERSION")),
        config: config.clone(),
        train: describe(&config.train, &train)?,
        test: describe(&config.test, &test)?,
        label_names: train.label_names().to_vec(),
        folds: k,
        warnings,
        native,
        ccp,
        reference: ReferenceValues::lookup(n, train.n_features()),
    };

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for format in &config.formats {
            match format {
                ReportFormat::Json => write(&dir.join("report.json"), &report.to_json())?,
                ReportFormat::Csv => {
                    write(&dir.join("metrics.csv"), &metrics_csv(&report))?;
                    write(&dir.join("sets.csv"), &sets_csv(&report))?;
                }
                ReportFormat::Text => write(&dir.join("tables.txt"), &text_tables(&report))?,
            }
        }
    }
    Ok(report)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn metrics_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("method,lambda,hamming_loss,accuracy,f_macro,f_micro\n");
    let mut row = |method: &str, lambda: &str, m: &MetricRow| {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            method, lambda, m.hamming_loss, m.accuracy, m.f_macro, m.f_micro
        );
    };
    for run in &report.ccp {
        row("ccp", &run.lambda.to_string(), &run.forced);
    }
    row("ml-rbf", "", &report.native);
    out
}

pub fn sets_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("lambda,confidence,bin,count,fraction\n");
    for run in &report.ccp {
        for c in &run.sets {
            for (b, (&count, frac)) in c.report.bin_counts.iter().zip(c.report.fractions()).enumerate() {
                let _ = writeln!(out, "{},{},{},{},{}", run.lambda, c.confidence, bin_label(b), count, frac);
            }
            let _ = writeln!(out, "{},{},errors,{},{}", run.lambda, c.confidence, c.report.errors, c.report.error_rate);
        }
    }
    out
}

/// Plain-text layout of the single-prediction and prediction-set tables.
pub fn text_tables(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Single predictions ({} test instances, {} folds)", report.test.rows, report.folds);
    let _ = writeln!(out, "{:<28}{:>9}{:>9}{:>9}{:>9}", "Method", "HL", "CA", "F-macro", "F-micro");
    let line = |out: &mut String, name: &str, m: &MetricRow| {
        let _ = writeln!(
            out,
            "{:<28}{:>9.4}{:>9.4}{:>9.4}{:>9.4}",
            name, m.hamming_loss, m.accuracy, m.f_macro, m.f_micro
        );
    };
    for run in &report.ccp {
        line(&mut out, &format!("ML-RBF CCP, lambda = {}", run.lambda), &run.forced);
    }
    line(&mut out, "ML-RBF", &report.native);
    if let Some(reference) = &report.reference {
        let _ = writeln!(out, "\n{} [{}]", reference.dataset, reference.note);
        for (name, m) in &reference.single {
            line(&mut out, name, m);
        }
    }

    for run in &report.ccp {
        let _ = writeln!(out, "\nPrediction sets, lambda = {}", run.lambda);
        let _ = write!(out, "{:<16}", "# of labelsets");
        for c in &run.sets {
            let _ = write!(out, "{:>10}", format!("{}%", c.confidence * 100.0));
        }
        out.push('\n');
        let bins = run.sets.first().map_or(0, |c| c.report.bin_counts.len());
        for b in 0..bins {
            let _ = write!(out, "{:<16}", bin_label(b));
            for c in &run.sets {
                let _ = write!(out, "{:>9.2}%", c.report.fractions()[b] * 100.0);
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<16}", "Errors");
        for c in &run.sets {
            let _ = write!(out, "{:>9.2}%", c.report.error_rate * 100.0);
        }
        out.push('\n');
    }
    out
}

/// Published single-prediction results for the two benchmark datasets,
/// carried for side-by-side comparison. None of these numbers is computed
/// by this crate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceValues {
    pub dataset: String,
    pub note: String,
    pub single: Vec<(String, MetricRow)>,
    /// `(lambda, [error rate at 95%, 90%, 80% confidence])`.
    pub set_errors: Vec<(f64, [f64; 3])>,
}

const fn row(hamming_loss: f64, accuracy: f64, f_macro: f64, f_micro: f64) -> MetricRow {
    MetricRow {
        hamming_loss,
        accuracy,
        f_macro,
        f_micro,
    }
}

impl ReferenceValues {
    /// Matches the dataset shape: scene has 6 labels and 294 features, yeast
    /// 14 labels and 103 features.
    pub fn lookup(n_labels: usize, n_features: usize) -> Option<Self> {
        let note = "published reference values, not computed".to_string();
        let named = |rows: [(&str, MetricRow); 6]| rows.iter().map(|(n, m)| (n.to_string(), *m)).collect();
        match (n_labels, n_features) {
            (6, 294) => Some(Self {
                dataset: "scene".into(),
                note,
                single: named([
                    ("ML-RBF CCP, lambda = 0", row(0.0928, 0.6798, 0.7417, 0.7363)),
                    ("ML-RBF CCP, lambda = 1", row(0.0927, 0.6831, 0.7410, 0.7358)),
                    ("ML-RBF", row(0.0959, 0.5468, 0.6922, 0.6890)),
                    ("BP-MLL", row(0.2903, 0.1630, 0.0509, 0.1665)),
                    ("ML-kNN", row(0.0953, 0.6012, 0.7189, 0.7183)),
                    ("ML-NB", row(0.1309, 0.4105, 0.6230, 0.6221)),
                ]),
                set_errors: vec![(0.0, [0.0376, 0.0928, 0.2107]), (1.0, [0.0360, 0.0928, 0.2099])],
            }),
            (14, 103) => Some(Self {
                dataset: "yeast".into(),
                note,
                single: named([
                    ("ML-RBF CCP, lambda = 0", row(0.1954, 0.1821, 0.3896, 0.6432)),
                    ("ML-RBF CCP, lambda = 1", row(0.1954, 0.1821, 0.3896, 0.6432)),
                    ("ML-RBF", row(0.1970, 0.1865, 0.3891, 0.6407)),
                    ("BP-MLL", row(0.2272, 0.0960, 0.3047, 0.6212)),
                    ("ML-kNN", row(0.1980, 0.1658, 0.3567, 0.6360)),
                    ("ML-NB", row(0.2115, 0.1254, 0.3428, 0.6152)),
                ]),
                set_errors: vec![(0.0, [0.0469, 0.0938, 0.1985]), (1.0, [0.0480, 0.0960, 0.1996])],
            }),
            _ => None,
        }
    }
}
