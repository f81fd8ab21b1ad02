//! CSV ingestion: first row is the header, the label lives in the last
//! column unless the hints name another one. Empty cells and `?` are
//! missing. Column kinds are inferred all-or-nothing: a column where every
//! non-missing cell parses as a number is numeric, anything else is
//! nominal; hints override inference per column.

use std::collections::BTreeMap;
use std::path::Path;

use crate::data::{Cell, Dataset, FeatureKind, FeatureSpec, Instance, InstanceId};
use crate::error::{Error, Result};

/// Per-column kind override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKindHint {
    Numeric,
    Nominal,
}

/// Optional ingestion overrides.
#[derive(Debug, Clone, Default)]
pub struct SchemaHints {
    /// Column name -> forced kind.
    pub kinds: BTreeMap<String, ColumnKindHint>,
    /// Name of the label column; defaults to the last column.
    pub label: Option<String>,
}

fn is_missing(raw: &str) -> bool {
    raw.is_empty() || raw == "?"
}

pub fn load_csv(path: impl AsRef<Path>, hints: &SchemaHints) -> Result<Dataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(&display, None, e.to_string()))?;

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse(&display, Some(1), e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() {
        return Err(Error::parse(&display, Some(1), "empty header"));
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(&display, Some(i + 2), e.to_string()))?;
        let row: Vec<String> = record.iter().map(str::to_string).collect();
        if row.len() != header.len() {
            return Err(Error::parse(
                &display,
                Some(i + 2),
                format!("row has {} cells, header has {}", row.len(), header.len()),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidDataset(format!("{display}: no data rows")));
    }

    let label_col = match &hints.label {
        Some(name) => header.iter().position(|h| h == name).ok_or_else(|| {
            Error::InvalidArgument(format!("label column '{name}' not found in header"))
        })?,
        None => header.len() - 1,
    };
    if let Some(unknown) = hints.kinds.keys().find(|k| !header.contains(k)) {
        return Err(Error::InvalidArgument(format!(
            "kind hint for unknown column '{unknown}'"
        )));
    }

    // Infer feature-column kinds.
    let mut features = Vec::new();
    let mut feature_cols = Vec::new();
    for (col, name) in header.iter().enumerate() {
        if col == label_col {
            continue;
        }
        feature_cols.push(col);
        let forced = hints.kinds.get(name).copied();
        let all_numeric = rows
            .iter()
            .map(|r| r[col].as_str())
            .filter(|raw| !is_missing(raw))
            .all(|raw| raw.parse::<f64>().is_ok());
        let kind = match forced {
            Some(ColumnKindHint::Numeric) if !all_numeric => {
                return Err(Error::InvalidDataset(format!(
                    "column '{name}' hinted numeric but holds non-numeric values"
                )));
            }
            Some(ColumnKindHint::Numeric) => FeatureKind::Numeric,
            Some(ColumnKindHint::Nominal) => nominal_kind(&rows, col),
            None if all_numeric => FeatureKind::Numeric,
            None => nominal_kind(&rows, col),
        };
        features.push(FeatureSpec {
            name: name.clone(),
            kind,
        });
    }

    // Classes in first-appearance order.
    let mut classes: Vec<String> = Vec::new();
    for row in &rows {
        let raw = &row[label_col];
        if is_missing(raw) {
            return Err(Error::InvalidDataset(format!(
                "{display}: missing class label"
            )));
        }
        if !classes.iter().any(|c| c == raw) {
            classes.push(raw.clone());
        }
    }
    if classes.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "{display}: label column has a single distinct value"
        )));
    }

    let mut instances = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut values = Vec::with_capacity(feature_cols.len());
        for (spec, col) in features.iter().zip(&feature_cols) {
            let raw = row[*col].as_str();
            let cell = if is_missing(raw) {
                Cell::Missing
            } else {
                match &spec.kind {
                    FeatureKind::Numeric => Cell::Numeric(raw.parse::<f64>().map_err(|_| {
                        Error::parse(
                            &display,
                            Some(i + 2),
                            format!("non-numeric value '{raw}' in numeric column"),
                        )
                    })?),
                    FeatureKind::Nominal(cats) => {
                        Cell::Category(cats.iter().position(|c| c == raw).expect("seen category"))
                    }
                }
            };
            values.push(cell);
        }
        let label = classes
            .iter()
            .position(|c| c == &row[label_col])
            .expect("seen class");
        instances.push(Instance {
            id: InstanceId(i as u32),
            values,
            label,
        });
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Dataset::new(name, features, classes, instances)
}

fn nominal_kind(rows: &[Vec<String>], col: usize) -> FeatureKind {
    let mut cats: Vec<String> = Vec::new();
    for row in rows {
        let raw = &row[col];
        if !is_missing(raw) && !cats.iter().any(|c| c == raw) {
            cats.push(raw.clone());
        }
    }
    FeatureKind::Nominal(cats)
}

/// Write the dataset as CSV (header row, label last, `?` for missing).
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::parse(&display, None, e.to_string()))?;

    let mut header: Vec<String> = dataset.features.iter().map(|f| f.name.clone()).collect();
    header.push("class".to_string());
    writer
        .write_record(&header)
        .map_err(|e| Error::parse(&display, None, e.to_string()))?;

    for inst in &dataset.instances {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        for (cell, feature) in inst.values.iter().zip(&dataset.features) {
            row.push(match cell {
                Cell::Missing => "?".to_string(),
                Cell::Numeric(v) => format!("{v}"),
                Cell::Category(c) => feature.kind.categories()[*c].clone(),
            });
        }
        row.push(dataset.classes[inst.label].clone());
        writer
            .write_record(&row)
            .map_err(|e| Error::parse(&display, None, e.to_string()))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(&display, e))?;
    Ok(())
}
