use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::one_hot;
use crate::svm::{Label, LabeledDataset};

/// Cells equal to one of these (after trimming) mark a missing value.
pub const MISSING_MARKERS: [&str; 2] = ["?", ""];

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedDataset {
    pub dataset: LabeledDataset,
    /// Numeric columns in file order, then `column=category` for each one-hot column.
    pub feature_names: Vec<String>,
    pub total_rows: usize,
    pub dropped_rows: usize,
}

fn is_missing(cell: &str) -> bool {
    MISSING_MARKERS.contains(&cell.trim())
}

/// Reads a headed, comma-separated file into raw (unscaled) features.
///
/// Every column other than the label, the categorical columns and the ignored
/// columns is parsed as a real number. Rows with a missing marker in any used
/// column are dropped. Categorical columns are one-hot encoded after the drop
/// and appended after the numeric columns.
pub fn load_csv(
    path: &Path,
    label_column: &str,
    positive_label: &str,
    categorical_columns: &[String],
    ignore_columns: &[String],
) -> Result<LoadedDataset> {
    let data_err = |message: String| Error::Data {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| data_err(e.to_string()))?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| data_err(format!("column {name:?} not found")))
    };
    let label_idx = find(label_column)?;
    let categorical_idx = categorical_columns
        .iter()
        .map(|c| find(c))
        .collect::<Result<Vec<_>>>()?;
    let ignored_idx = ignore_columns
        .iter()
        .map(|c| find(c))
        .collect::<Result<Vec<_>>>()?;
    let numeric_idx: Vec<usize> = (0..headers.len())
        .filter(|i| *i != label_idx && !categorical_idx.contains(i) && !ignored_idx.contains(i))
        .collect();

    let mut numeric_rows: Vec<Vec<f64>> = Vec::new();
    let mut categorical_cols: Vec<Vec<String>> = vec![Vec::new(); categorical_idx.len()];
    let mut labels = Vec::new();
    let mut total_rows = 0;
    let mut dropped_rows = 0;

    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        total_rows += 1;
        let line = row_no + 2;
        let used = std::iter::once(label_idx)
            .chain(numeric_idx.iter().copied())
            .chain(categorical_idx.iter().copied());
        if used.clone().any(|i| record.get(i).is_none_or(is_missing)) {
            dropped_rows += 1;
            continue;
        }
        let numeric = numeric_idx
            .iter()
            .map(|&i| {
                let cell = &record[i];
                cell.parse::<f64>().map_err(|_| {
                    data_err(format!(
                        "line {line}: column {:?} value {cell:?} is not numeric",
                        headers[i]
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        numeric_rows.push(numeric);
        for (col, &i) in categorical_cols.iter_mut().zip(&categorical_idx) {
            col.push(record[i].to_string());
        }
        labels.push(if record[label_idx] == *positive_label {
            Label::Positive
        } else {
            Label::Negative
        });
    }

    let mut feature_names: Vec<String> = numeric_idx.iter().map(|&i| headers[i].clone()).collect();
    let mut features = numeric_rows;
    for (col, &i) in categorical_cols.iter().zip(&categorical_idx) {
        let encoded = one_hot(col);
        for (category, column) in encoded.categories.iter().zip(&encoded.columns) {
            feature_names.push(format!("{}={category}", headers[i]));
            for (row, v) in features.iter_mut().zip(column) {
                row.push(*v);
            }
        }
    }

    if feature_names.is_empty() {
        return Err(data_err("no feature columns".into()));
    }
    let positives = labels.iter().filter(|&&l| l == Label::Positive).count();
    if positives == 0 || positives == labels.len() {
        return Err(data_err(format!(
            "{} usable rows but only one class present (positive label {positive_label:?} matched {positives})",
            labels.len()
        )));
    }

    Ok(LoadedDataset {
        dataset: LabeledDataset::new(features, labels)?,
        feature_names,
        total_rows,
        dropped_rows,
    })
}
