//! Dense ARFF subset used by the Mulan multi-label files, plus the Mulan XML
//! label list.
//!
//! Supported: `@relation`, `@attribute <name> numeric|real|integer`,
//! `@attribute <name> {0,1}`, `@data` followed by dense comma-separated rows,
//! `%` comments. Keywords are case-insensitive. Anything else is rejected.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::labelset::LabelSet;
use crate::scalar::Scalar;

use super::MultiLabelDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    /// Nominal with exactly the values `{0,1}`.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArffAttribute {
    pub name: String,
    pub kind: AttributeKind,
}

/// Raw contents of a parsed ARFF file; cells are kept as text.
#[derive(Debug, Clone)]
pub struct ArffFile {
    pub relation: String,
    pub attributes: Vec<ArffAttribute>,
    pub rows: Vec<Vec<String>>,
}

/// Loads a Mulan dataset: ARFF data plus the XML file naming the label
/// attributes. Label columns follow the XML order; features keep the ARFF
/// declaration order with the label columns removed.
pub fn load_mulan<F: Scalar>(arff_path: &Path, xml_path: &Path) -> Result<MultiLabelDataset<F>> {
    let arff_text = std::fs::read_to_string(arff_path).map_err(|e| Error::io(arff_path, e))?;
    let xml_text = std::fs::read_to_string(xml_path).map_err(|e| Error::io(xml_path, e))?;
    let arff = parse_arff(&arff_text)?;
    let labels = parse_label_xml(&xml_text)?;
    assemble(&arff, &labels)
}

fn assemble<F: Scalar>(arff: &ArffFile, label_names: &[String]) -> Result<MultiLabelDataset<F>> {
    let position: HashMap<&str, usize> = arff
        .attributes
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name.as_str(), i))
        .collect();
    let mut label_cols = Vec::with_capacity(label_names.len());
    for name in label_names {
        match position.get(name.as_str()) {
            Some(&col) => label_cols.push(col),
            None => return Err(Error::MissingLabel(name.clone())),
        }
    }
    let mut is_label = vec![false; arff.attributes.len()];
    for &c in &label_cols {
        is_label[c] = true;
    }
    let feature_cols: Vec<usize> = (0..arff.attributes.len()).filter(|&c| !is_label[c]).collect();
    if let Some(&c) = feature_cols
        .iter()
        .find(|&&c| arff.attributes[c].kind != AttributeKind::Numeric)
    {
        return Err(Error::Arff {
            line: 0,
            message: format!(
                "attribute `{}` is nominal but not listed as a label; only numeric features are supported",
                arff.attributes[c].name
            ),
        });
    }

    let mut features = Vec::with_capacity(arff.rows.len() * feature_cols.len());
    let mut labels = Vec::with_capacity(arff.rows.len());
    for (r, row) in arff.rows.iter().enumerate() {
        for &c in &feature_cols {
            let cell = row[c].as_str();
            let value = cell.parse::<F>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::NonNumeric {
                row: r + 1,
                column: arff.attributes[c].name.clone(),
                value: cell.to_string(),
            })?;
            features.push(value);
        }
        let mut ls = LabelSet::EMPTY;
        for (j, &c) in label_cols.iter().enumerate() {
            match unquote(&row[c]) {
                "1" => ls.insert(j),
                "0" => {}
                other => {
                    return Err(Error::InvalidLabel {
                        row: r + 1,
                        column: arff.attributes[c].name.clone(),
                        value: other.to_string(),
                    })
                }
            }
        }
        labels.push(ls);
    }
    MultiLabelDataset::from_labelsets(features, feature_cols.len(), labels, label_names.to_vec())
}

pub fn parse_arff(text: &str) -> Result<ArffFile> {
    let mut relation = None;
    let mut attributes: Vec<ArffAttribute> = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let err = |message: String| Error::Arff {
            line: line_no,
            message,
        };
        if in_data {
            if line.starts_with('{') {
                return Err(err("sparse ARFF rows are not supported".into()));
            }
            let cells: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
            if cells.len() != attributes.len() {
                return Err(err(format!(
                    "row has {} values, {} attributes declared",
                    cells.len(),
                    attributes.len()
                )));
            }
            if let Some(pos) = cells.iter().position(|c| c == "?") {
                return Err(err(format!(
                    "missing value for attribute `{}`",
                    attributes[pos].name
                )));
            }
            rows.push(cells);
            continue;
        }

        let (keyword, rest) = split_keyword(line);
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => {
                let (name, _) = take_name(rest).map_err(err)?;
                relation = Some(name);
            }
            "@attribute" => {
                if relation.is_none() {
                    return Err(err("@attribute before @relation".into()));
                }
                let (name, ty) = take_name(rest).map_err(err)?;
                let kind = parse_type(ty.trim()).map_err(err)?;
                attributes.push(ArffAttribute { name, kind });
            }
            "@data" => {
                if attributes.is_empty() {
                    return Err(err("@data before any @attribute".into()));
                }
                in_data = true;
            }
            _ => return Err(err(format!("unexpected header line `{}`", line))),
        }
    }
    if !in_data {
        return Err(Error::Arff {
            line: text.lines().count(),
            message: "no @data section".into(),
        });
    }
    Ok(ArffFile {
        relation: relation.unwrap_or_default(),
        attributes,
        rows,
    })
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim_start()),
        None => (line, ""),
    }
}

/// Reads a possibly quoted attribute/relation name and returns it with the
/// remainder of the line.
fn take_name(s: &str) -> std::result::Result<(String, &str), String> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        None => Err("missing name".into()),
        Some((_, q @ ('\'' | '"'))) => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    name.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((name, &s[i + c.len_utf8()..]));
                } else {
                    name.push(c);
                }
            }
            Err("unterminated quoted name".into())
        }
        Some(_) => {
            let end = s.find(char::is_whitespace).unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

fn parse_type(ty: &str) -> std::result::Result<AttributeKind, String> {
    if let Some(inner) = ty.strip_prefix('{') {
        let inner = inner
            .strip_suffix('}')
            .ok_or_else(|| format!("unterminated nominal specification `{}`", ty))?;
        let mut values: Vec<&str> = inner.split(',').map(|v| unquote(v.trim())).collect();
        values.sort_unstable();
        return if values == ["0", "1"] {
            Ok(AttributeKind::Binary)
        } else {
            Err(format!("nominal attribute `{}` is not {{0,1}}", ty))
        };
    }
    match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(AttributeKind::Numeric),
        other => Err(format!("unsupported attribute type `{}`", other)),
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['\'', '"'] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

/// Label names from a Mulan XML label list, in document order. Nested
/// (hierarchical) labels are flattened.
pub fn parse_label_xml(text: &str) -> Result<Vec<String>> {
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::LabelXml(e.to_string()))?;
    let mut names = Vec::new();
    for node in doc.descendants().filter(|n| n.tag_name().name() == "label") {
        match node.attribute("name") {
            Some(name) => names.push(name.to_string()),
            None => return Err(Error::LabelXml("<label> element without a name attribute".into())),
        }
    }
    if names.is_empty() {
        return Err(Error::LabelXml("no <label> elements".into()));
    }
    Ok(names)
}
