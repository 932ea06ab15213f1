//! CSV ingestion and preparation of the red wine quality and California
//! housing regression datasets as least-squares problems.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::{info, warn};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};
use crate::rng;
use crate::solver::LlspProblem;

/// A numeric table. Empty cells are kept as `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub delimiter: u8,
}

impl CsvTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Index of the column whose name matches `name`, ignoring case, spaces
    /// and punctuation (so `housingMedianAge` matches `housing_median_age`).
    pub fn column_index(&self, name: &str) -> Option<usize> {
        let key = normalize(name);
        self.header.iter().position(|h| normalize(h) == key)
    }
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Picks `;` or `,` by whichever occurs more often in the first line.
pub fn detect_delimiter(text: &str) -> u8 {
    let first = text.lines().next().unwrap_or("");
    let semis = first.matches(';').count();
    let commas = first.matches(',').count();
    if semis > commas {
        b';'
    } else {
        b','
    }
}

pub fn load_csv(path: impl AsRef<Path>, delimiter: Option<u8>) -> Result<CsvTable> {
    load_csv_columns(path, delimiter, None)
}

/// Like [`load_csv`], but only the named columns are parsed and kept; other
/// columns may hold text.
pub fn load_csv_columns(
    path: impl AsRef<Path>,
    delimiter: Option<u8>,
    columns: Option<&[&str]>,
) -> Result<CsvTable> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    let table = parse_csv(&bytes, delimiter, columns)?;
    info!(
        "{}: {} data rows, {} columns",
        path.display(),
        table.len(),
        table.header.len()
    );
    Ok(table)
}

/// Parses CSV text with a header line.
pub fn parse_csv(bytes: &[u8], delimiter: Option<u8>, columns: Option<&[&str]>) -> Result<CsvTable> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Csv(format!("input is not UTF-8: {e}")))?;
    let delimiter = delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let full_header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if full_header.iter().all(String::is_empty) {
        return Err(Error::Csv("missing header line".into()));
    }
    let width = full_header.len();

    let keep: Vec<usize> = match columns {
        None => (0..width).collect(),
        Some(names) => {
            let keys: Vec<String> = full_header.iter().map(|h| normalize(h)).collect();
            names
                .iter()
                .map(|n| {
                    keys.iter()
                        .position(|k| *k == normalize(n))
                        .ok_or_else(|| Error::Dataset(format!("column {n:?} not found in header")))
                })
                .collect::<Result<_>>()?
        }
    };

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        if record.len() != width {
            return Err(Error::Parse {
                row,
                column: record.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let parsed = keep
            .iter()
            .map(|&j| {
                parse_cell(&record[j]).map_err(|message| Error::Parse {
                    row,
                    column: j + 1,
                    message,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(parsed);
    }
    Ok(CsvTable {
        header: keep.iter().map(|&j| full_header[j].clone()).collect(),
        rows,
        delimiter,
    })
}

/// Parses a purely numeric CSV matrix. A first line containing any
/// non-numeric field is taken as a header and skipped. Every row must have
/// the same width and every cell must hold a finite number.
pub fn parse_matrix_csv(bytes: &[u8], delimiter: Option<u8>) -> Result<DenseMatrix> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Csv(format!("input is not UTF-8: {e}")))?;
    let delimiter = delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut data = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Parse {
                row,
                column: record.len().min(w) + 1,
                message: format!("expected {w} fields, found {}", record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            match parse_cell(cell) {
                Ok(Some(v)) => data.push(v),
                Ok(None) => {
                    return Err(Error::Parse {
                        row,
                        column: j + 1,
                        message: "empty cell".into(),
                    })
                }
                Err(message) => {
                    return Err(Error::Parse {
                        row,
                        column: j + 1,
                        message,
                    })
                }
            }
        }
        rows += 1;
    }
    match width {
        Some(w) if rows > 0 => DenseMatrix::new(rows, w, data),
        _ => Err(Error::Csv("no numeric rows".into())),
    }
}

pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    parse_matrix_csv(&bytes, None)
}

fn parse_cell(cell: &str) -> std::result::Result<Option<f64>, String> {
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Err(format!("non-finite value {cell:?}")),
        Err(_) => Err(format!("not a number: {cell:?}")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetName {
    RedWine,
    CaliHousing,
}

impl DatasetName {
    pub fn name(self) -> &'static str {
        match self {
            DatasetName::RedWine => "redwine",
            DatasetName::CaliHousing => "calihousing",
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "redwine" => Ok(DatasetName::RedWine),
            "calihousing" => Ok(DatasetName::CaliHousing),
            _ => Err(Error::param(format!("unknown dataset {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bias {
    None,
    First,
    Last,
}

/// How a table becomes an `(A, b)` problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub name: DatasetName,
    pub target_column: String,
    pub feature_columns: Vec<String>,
    /// Zero-pad to this many rows when the table has `expected_rows` rows;
    /// otherwise pad to the next power of two.
    pub pad_to: Option<usize>,
    pub expected_rows: Option<usize>,
    /// Uniformly sample this many complete rows without replacement.
    pub sample_to: Option<usize>,
    pub bias: Bias,
    /// Apply a uniformly random row permutation after padding.
    pub shuffle_rows: bool,
}

pub const REDWINE_FEATURES: [&str; 11] = [
    "fixed acidity",
    "volatile acidity",
    "citric acid",
    "residual sugar",
    "chlorides",
    "free sulfur dioxide",
    "total sulfur dioxide",
    "density",
    "pH",
    "sulphates",
    "alcohol",
];

pub const CALIHOUSING_FEATURES: [&str; 8] = [
    "longitude",
    "latitude",
    "housing_median_age",
    "total_rooms",
    "total_bedrooms",
    "population",
    "households",
    "median_income",
];

impl DatasetSpec {
    /// 1599 wines, bias column first, zero-padded to 2048 rows and shuffled.
    pub fn redwine() -> Self {
        DatasetSpec {
            name: DatasetName::RedWine,
            target_column: "quality".into(),
            feature_columns: REDWINE_FEATURES.iter().map(|s| s.to_string()).collect(),
            pad_to: Some(2048),
            expected_rows: Some(1599),
            sample_to: None,
            bias: Bias::First,
            shuffle_rows: true,
        }
    }

    /// 16384 sampled block groups, 8 features, bias column last.
    pub fn calihousing() -> Self {
        DatasetSpec {
            name: DatasetName::CaliHousing,
            target_column: "median_house_value".into(),
            feature_columns: CALIHOUSING_FEATURES.iter().map(|s| s.to_string()).collect(),
            pad_to: None,
            expected_rows: None,
            sample_to: Some(16384),
            bias: Bias::Last,
            shuffle_rows: false,
        }
    }

    pub fn for_name(name: DatasetName) -> Self {
        match name {
            DatasetName::RedWine => Self::redwine(),
            DatasetName::CaliHousing => Self::calihousing(),
        }
    }

    /// Every column the preparation reads, features first.
    pub fn columns(&self) -> Vec<&str> {
        self.feature_columns
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.target_column.as_str()))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self
            .feature_columns
            .iter()
            .any(|f| normalize(f) == normalize(&self.target_column))
        {
            return Err(Error::Dataset(format!(
                "target column {:?} is also a feature",
                self.target_column
            )));
        }
        if self.feature_columns.is_empty() {
            return Err(Error::Dataset("no feature columns".into()));
        }
        Ok(())
    }
}

/// Builds `(A, b)` from `table` following `spec`.
pub fn prepare(spec: &DatasetSpec, table: &CsvTable, seed: u64) -> Result<LlspProblem> {
    spec.validate()?;
    let missing: Vec<&str> = spec
        .columns()
        .into_iter()
        .filter(|c| table.column_index(c).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Dataset(format!(
            "{}: missing columns {missing:?}",
            spec.name
        )));
    }
    let feature_idx: Vec<usize> = spec
        .feature_columns
        .iter()
        .filter_map(|c| table.column_index(c))
        .collect();
    let target_idx = table.column_index(&spec.target_column).expect("checked above");

    let mut records: Vec<(Vec<f64>, f64)> = Vec::with_capacity(table.len());
    for row in &table.rows {
        let feats: Option<Vec<f64>> = feature_idx.iter().map(|&j| row[j]).collect();
        if let (Some(f), Some(t)) = (feats, row[target_idx]) {
            records.push((f, t));
        }
    }
    let dropped = table.len() - records.len();
    if dropped > 0 {
        warn!("{}: dropped {dropped} incomplete records", spec.name);
    }

    let mut r = rng::stream(seed);
    if let Some(n) = spec.sample_to {
        if records.len() < n {
            return Err(Error::Dataset(format!(
                "{}: need {n} complete records, found {}",
                spec.name,
                records.len()
            )));
        }
        let picked = rng::sample_without_replacement(&mut r, records.len(), n);
        records = picked.into_iter().map(|i| records[i].clone()).collect();
    }

    let n_rows = records.len();
    let height = match spec.pad_to {
        None => n_rows,
        Some(target) => {
            if spec.expected_rows.is_some_and(|e| e != n_rows) || n_rows > target {
                warn!(
                    "{}: expected {} rows, found {n_rows}; padding to {}",
                    spec.name,
                    spec.expected_rows.unwrap_or(target),
                    n_rows.next_power_of_two()
                );
                n_rows.next_power_of_two()
            } else {
                target
            }
        }
    };

    let d = feature_idx.len() + usize::from(spec.bias != Bias::None);
    if height <= d {
        return Err(Error::Dataset(format!(
            "{}: {height} rows is not enough for {d} columns",
            spec.name
        )));
    }
    let mut a = vec![0.0; height * d];
    let mut b = vec![0.0; height];
    for (i, (feats, target)) in records.iter().enumerate() {
        let row = &mut a[i * d..(i + 1) * d];
        match spec.bias {
            Bias::First => {
                row[0] = 1.0;
                row[1..].copy_from_slice(feats);
            }
            Bias::Last => {
                row[..d - 1].copy_from_slice(feats);
                row[d - 1] = 1.0;
            }
            Bias::None => row.copy_from_slice(feats),
        }
        b[i] = *target;
    }
    let mut a = DenseMatrix::new(height, d, a)?;
    let mut b = Vector::new(b)?;
    if spec.shuffle_rows {
        let order = rng::permutation(&mut r, height);
        a = a.permute_rows(&order);
        b = Vector::new(order.iter().map(|&i| b[i]).collect())?;
    }
    LlspProblem::new(a, b)
}

pub fn prepare_redwine(table: &CsvTable, seed: u64) -> Result<LlspProblem> {
    prepare(&DatasetSpec::redwine(), table, seed)
}

pub fn prepare_calihousing(table: &CsvTable, seed: u64) -> Result<LlspProblem> {
    prepare(&DatasetSpec::calihousing(), table, seed)
}

/// Loads `path` and prepares it as dataset `name`, parsing only the columns
/// the dataset needs.
pub fn load_dataset(name: DatasetName, path: impl AsRef<Path>, seed: u64) -> Result<LlspProblem> {
    load_dataset_with(&DatasetSpec::for_name(name), path, seed)
}

pub fn load_dataset_with(spec: &DatasetSpec, path: impl AsRef<Path>, seed: u64) -> Result<LlspProblem> {
    let columns = spec.columns();
    let table = load_csv_columns(path, None, Some(&columns))?;
    prepare(spec, &table, seed)
}
