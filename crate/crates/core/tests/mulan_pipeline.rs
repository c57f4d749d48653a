use std::fmt::Write as _;
use std::path::Path;

use mlccp::dataset::write_csv;
use mlccp::experiment::{run_experiment, DataSource, ExperimentConfig, FoldRule};
use mlccp::synthetic::SyntheticProblem;
use mlccp::{load_mulan, MultiLabelDataset};

/// Writes `data` as a Mulan pair with label columns first in the ARFF.
fn write_mulan(data: &MultiLabelDataset, arff: &Path, xml: &Path) {
    let mut text = String::from("@relation 'synthetic: test'\n\n");
    for name in data.label_names() {
        let _ = writeln!(text, "@attribute {} {{0,1}}", name);
    }
    for f in 0..data.n_features() {
        let _ = writeln!(text, "@ATTRIBUTE Att{} NUMERIC", f + 1);
    }
    text.push_str("\n@data\n");
    for i in 0..data.len() {
        let mut fields: Vec<String> = (0..data.n_labels()).map(|j| (data.label(i, j) as u8).to_string()).collect();
        fields.extend(data.row(i).iter().map(|v| v.to_string()));
        let _ = writeln!(text, "{}", fields.join(","));
    }
    std::fs::write(arff, text).unwrap();

    let mut labels = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n");
    for name in data.label_names() {
        let _ = writeln!(labels, "<label name=\"{}\"></label>", name);
    }
    labels.push_str("</labels>\n");
    std::fs::write(xml, labels).unwrap();
}

#[test]
fn mulan_and_csv_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| dir.path().join(f);
    let problem = SyntheticProblem::new(6, 5, 21);
    let train = problem.sample(300, 1);
    let test = problem.sample(120, 2);

    write_mulan(&train, &p("train.arff"), &p("labels.xml"));
    write_mulan(&test, &p("test.arff"), &p("labels.xml"));
    write_csv(&train, &p("tx.csv"), &p("ty.csv")).unwrap();
    write_csv(&test, &p("sx.csv"), &p("sy.csv")).unwrap();

    let loaded: MultiLabelDataset = load_mulan(&p("train.arff"), &p("labels.xml")).unwrap();
    assert_eq!(loaded, train);

    let mut mulan = ExperimentConfig::new(
        DataSource::Mulan { arff: p("train.arff"), xml: p("labels.xml") },
        DataSource::Mulan { arff: p("test.arff"), xml: p("labels.xml") },
    );
    mulan.folds = FoldRule::Fixed(3);
    mulan.rbf.fraction = 0.05;
    let mut csv = mulan.clone();
    csv.train = DataSource::Csv { features: p("tx.csv"), labels: p("ty.csv") };
    csv.test = DataSource::Csv { features: p("sx.csv"), labels: p("sy.csv") };

    let a = run_experiment(&mulan, None).unwrap();
    let b = run_experiment(&csv, None).unwrap();
    assert_eq!(a.folds, 3);
    assert_eq!(a.native, b.native);
    assert_eq!(a.ccp, b.ccp);
    assert!(a.reference.is_none());
    for run in &a.ccp {
        assert_eq!(run.sets.len(), 3);
        assert!(run.mean_credibility > 0.0 && run.mean_credibility <= 1.0);
    }
}
