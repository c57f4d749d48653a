//! Plain CSV fallback: a header-less feature file and a label file whose
//! single header row carries the label names.

use std::path::Path;

use crate::error::{Error, Result};
use crate::labelset::LabelSet;
use crate::scalar::Scalar;

use super::MultiLabelDataset;

pub fn load_csv<F: Scalar>(features_path: &Path, labels_path: &Path) -> Result<MultiLabelDataset<F>> {
    let (features, n_features, n_rows) = read_features(features_path)?;
    let (names, labels) = read_labels(labels_path)?;
    if labels.len() != n_rows {
        return Err(Error::Csv(format!(
            "{} has {} rows but {} has {}",
            features_path.display(),
            n_rows,
            labels_path.display(),
            labels.len()
        )));
    }
    MultiLabelDataset::from_labelsets(features, n_features, labels, names)
}

fn open(path: &Path, headers: bool) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv(format!("{}: {}", path.display(), e))
}

fn read_features<F: Scalar>(path: &Path) -> Result<(Vec<F>, usize, usize)> {
    let mut reader = open(path, false)?;
    let mut values = Vec::new();
    let mut width = 0;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        rows += 1;
        if rows == 1 {
            width = record.len();
        }
        for (c, cell) in record.iter().enumerate() {
            let v = cell.parse::<F>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::NonNumeric {
                row: rows,
                column: (c + 1).to_string(),
                value: cell.to_string(),
            })?;
            values.push(v);
        }
    }
    if rows == 0 {
        return Err(Error::Csv(format!("{}: no rows", path.display())));
    }
    Ok((values, width, rows))
}

fn read_labels(path: &Path) -> Result<(Vec<String>, Vec<LabelSet>)> {
    let mut reader = open(path, true)?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().all(|n| n.is_empty()) {
        return Err(Error::Csv(format!("{}: empty label header", path.display())));
    }
    if let Some(c) = names.iter().position(|n| n.is_empty()) {
        return Err(Error::Csv(format!("{}: label column {} has no name", path.display(), c + 1)));
    }
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let mut ls = LabelSet::EMPTY;
        for (j, cell) in record.iter().enumerate() {
            match cell {
                "1" => ls.insert(j),
                "0" => {}
                other => {
                    return Err(Error::InvalidLabel {
                        row: r + 1,
                        column: names[j].clone(),
                        value: other.to_string(),
                    })
                }
            }
        }
        labels.push(ls);
    }
    Ok((names, labels))
}

/// Writes `dataset` in the CSV fallback layout. Features use the shortest
/// decimal text that parses back to the same value.
pub fn write_csv<F: Scalar>(dataset: &MultiLabelDataset<F>, features_path: &Path, labels_path: &Path) -> Result<()> {
    let write = |path: &Path, build: &dyn Fn(&mut csv::Writer<std::fs::File>) -> csv::Result<()>| {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        build(&mut w).map_err(|e| csv_err(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    };
    write(features_path, &|w| {
        for row in dataset.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        Ok(())
    })?;
    write(labels_path, &|w| {
        w.write_record(dataset.label_names())?;
        for &ls in dataset.labels() {
            w.write_record((0..dataset.n_labels()).map(|j| if ls.contains(j) { "1" } else { "0" }))?;
        }
        Ok(())
    })
}
