//! CSV ingestion with a sidecar JSON schema.
//!
//! The schema names the response column, its kind, and the kind of every
//! predictor:
//!
//! ```json
//! {
//!   "response": "y",
//!   "response_kind": "continuous",
//!   "columns": [
//!     {"name": "age", "kind": "quantitative"},
//!     {"name": "site", "kind": "qualitative"}
//!   ]
//! }
//! ```
//!
//! Rows with a missing cell (empty, `NA`, `NaN`, `null`, `?`) in any used
//! column are dropped and counted.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::dataset::{Column, Dataset, ResponseKind, VariableKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: VariableKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub response: String,
    pub response_kind: ResponseKind,
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn read(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_reader(f).map_err(|e| {
            Error::Invalid(format!("{}: malformed schema: {e}", path.display()))
        })
    }

    pub fn for_dataset<T: Scalar>(d: &Dataset<T>, response: &str) -> Self {
        Schema {
            response: response.to_string(),
            response_kind: d.response_kind(),
            columns: d
                .names()
                .iter()
                .zip(d.kinds())
                .map(|(n, k)| ColumnSpec {
                    name: n.clone(),
                    kind: k,
                })
                .collect(),
        }
    }
}

/// Outcome of reading a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
}

fn is_missing(cell: &str) -> bool {
    matches!(
        cell.trim(),
        "" | "NA" | "na" | "N/A" | "NaN" | "nan" | "null" | "NULL" | "?"
    )
}

/// Read `csv_path` according to `schema`.
pub fn read_dataset<T: Scalar>(
    csv_path: &Path,
    schema: &Schema,
) -> Result<(Dataset<T>, IngestReport)> {
    let file = File::open(csv_path).map_err(|e| Error::io(csv_path.display().to_string(), e))?;
    read_dataset_from(file, schema)
}

pub fn read_dataset_from<T: Scalar, R: Read>(
    reader: R,
    schema: &Schema,
) -> Result<(Dataset<T>, IngestReport)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Invalid(format!("column `{name}` missing from CSV header")))
    };
    let y_idx = find(&schema.response)?;
    let col_idx: Vec<usize> = schema
        .columns
        .iter()
        .map(|c| find(&c.name))
        .collect::<Result<_>>()?;
    for h in header.iter() {
        if h != schema.response && !schema.columns.iter().any(|c| c.name == h) {
            warn!("ignoring column `{h}` not declared in the schema");
        }
    }

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); col_idx.len()];
    let mut y = Vec::new();
    let (mut rows_read, mut rows_dropped) = (0, 0);
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        rows_read += 1;
        let cell = |i: usize| rec.get(i).unwrap_or("");
        if is_missing(cell(y_idx)) || col_idx.iter().any(|&i| is_missing(cell(i))) {
            rows_dropped += 1;
            continue;
        }
        let yv: f64 = cell(y_idx).trim().parse().map_err(|_| {
            Error::Invalid(format!(
                "row {}: response `{}` is not numeric",
                line + 2,
                cell(y_idx)
            ))
        })?;
        y.push(T::lit(yv));
        for (k, &i) in col_idx.iter().enumerate() {
            raw[k].push(cell(i).trim().to_string());
        }
    }
    if rows_dropped > 0 {
        info!("dropped {rows_dropped} of {rows_read} rows with missing cells");
    }

    let mut columns = Vec::with_capacity(raw.len());
    for (spec, cells) in schema.columns.iter().zip(raw) {
        columns.push(match spec.kind {
            VariableKind::Quantitative => Column::Quantitative(
                cells
                    .iter()
                    .map(|c| {
                        c.parse::<f64>().map(T::lit).map_err(|_| {
                            Error::Invalid(format!("column `{}`: `{c}` is not numeric", spec.name))
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            VariableKind::Qualitative => {
                let levels = sorted_levels(&cells);
                let codes = cells
                    .iter()
                    .map(|c| levels.iter().position(|l| l == c).expect("level present"))
                    .collect();
                Column::Qualitative { codes, levels }
            }
        });
    }
    let names = schema.columns.iter().map(|c| c.name.clone()).collect();
    let d = Dataset::new(columns, names, y, schema.response_kind)?;
    d.check_categories()?;
    Ok((
        d,
        IngestReport {
            rows_read,
            rows_dropped,
        },
    ))
}

/// Numeric labels sort numerically, anything else lexicographically.
fn sorted_levels(cells: &[String]) -> Vec<String> {
    let set: BTreeSet<&String> = cells.iter().collect();
    let mut levels: Vec<String> = set.into_iter().cloned().collect();
    if levels.iter().all(|l| l.parse::<f64>().is_ok()) {
        levels.sort_by(|a, b| {
            let (x, y) = (a.parse::<f64>().unwrap(), b.parse::<f64>().unwrap());
            x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(b))
        });
    }
    levels
}

/// Write a dataset as CSV (predictors then response) plus its schema.
pub fn write_dataset<T: Scalar>(
    d: &Dataset<T>,
    response: &str,
    csv_path: &Path,
    schema_path: &Path,
) -> Result<()> {
    let file = File::create(csv_path).map_err(|e| Error::io(csv_path.display().to_string(), e))?;
    write_dataset_to(d, response, file)?;
    let mut sf =
        File::create(schema_path).map_err(|e| Error::io(schema_path.display().to_string(), e))?;
    serde_json::to_writer_pretty(&mut sf, &Schema::for_dataset(d, response))?;
    writeln!(sf).map_err(|e| Error::io(schema_path.display().to_string(), e))?;
    Ok(())
}

pub fn write_dataset_to<T: Scalar, W: Write>(d: &Dataset<T>, response: &str, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = d.names().iter().map(String::as_str).collect();
    header.push(response);
    wtr.write_record(&header)?;
    for i in 0..d.n() {
        let mut rec: Vec<String> = d
            .columns()
            .iter()
            .map(|c| match c {
                Column::Quantitative(v) => format!("{}", v[i]),
                Column::Qualitative { codes, levels } => levels[codes[i]].clone(),
            })
            .collect();
        rec.push(format!("{}", d.y()[i]));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("csv output", e))?;
    Ok(())
}
