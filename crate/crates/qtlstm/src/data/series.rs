//! Tabular time series: an ordered timestamp column plus named numeric
//! columns, with explicit bookkeeping for missing cells.
//!
//! CSV dialect: first column is the timestamp (integer index or ISO-8601
//! text), remaining columns are numeric, dot-decimal, one header row,
//! newline-terminated records. Blank or unparseable cells load as gaps and
//! must be imputed before windowing.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Timestamp of one row: either an integer sample index or ISO-8601 text
/// (which orders correctly as a string). A file must stick to one kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Timestamp {
    Index(i64),
    Text(String),
}

impl Timestamp {
    fn parse(raw: &str) -> Timestamp {
        match raw.parse::<i64>() {
            Ok(v) => Timestamp::Index(v),
            Err(_) => Timestamp::Text(raw.to_string()),
        }
    }

    fn same_kind(&self, other: &Timestamp) -> bool {
        matches!(
            (self, other),
            (Timestamp::Index(_), Timestamp::Index(_)) | (Timestamp::Text(_), Timestamp::Text(_))
        )
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timestamp::Index(v) => write!(f, "{v}"),
            Timestamp::Text(s) => write!(f, "{s}"),
        }
    }
}

/// Names the columns a dataset must provide: the water-level column that
/// forms the prediction target and the feature columns fed to the model.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub level_column: String,
    pub feature_columns: Vec<String>,
}

impl CsvSchema {
    fn required_columns(&self) -> Vec<&str> {
        let mut cols: Vec<&str> = vec![self.level_column.as_str()];
        for c in &self.feature_columns {
            if !cols.contains(&c.as_str()) {
                cols.push(c);
            }
        }
        cols
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// An ordered table of named series. `usable_from` marks the first row on
/// which every column is defined; lag columns push it forward.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    timestamps: Vec<Timestamp>,
    columns: Vec<Column>,
    usable_from: usize,
}

impl SeriesTable {
    pub fn new(timestamps: Vec<Timestamp>, columns: Vec<Column>) -> Result<Self> {
        for pair in timestamps.windows(2) {
            if !pair[0].same_kind(&pair[1]) {
                return Err(Error::Data("mixed timestamp kinds in one table".into()));
            }
            if pair[0] >= pair[1] {
                return Err(Error::Data(format!(
                    "timestamps not strictly increasing: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for col in &columns {
            if col.values.len() != timestamps.len() {
                return Err(Error::Shape {
                    what: "column length",
                    expected: timestamps.len(),
                    actual: col.values.len(),
                });
            }
        }
        let mut seen: Vec<&str> = Vec::new();
        for col in &columns {
            if seen.contains(&col.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column {}", col.name)));
            }
            seen.push(&col.name);
        }
        Ok(SeriesTable {
            timestamps,
            columns,
            usable_from: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.timestamps.len()
    }

    pub fn usable_from(&self) -> usize {
        self.usable_from
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::Schema(format!("missing column {name}")))
    }

    /// Number of gap cells across all columns.
    pub fn gap_count(&self) -> usize {
        self.columns
            .iter()
            .map(|c| c.values.iter().filter(|v| v.is_none()).count())
            .sum()
    }

    /// Imputes every gap by forward fill, then backward fill for gaps at the
    /// start. Returns the number of cells filled. A column with no data at
    /// all cannot be imputed.
    pub fn fill_missing(&mut self) -> Result<usize> {
        let mut filled = 0;
        for col in &mut self.columns {
            if col.values.iter().all(|v| v.is_none()) {
                return Err(Error::Data(format!("column {} has no data", col.name)));
            }
            let mut last = None;
            for v in col.values.iter_mut() {
                match v {
                    Some(x) => last = Some(*x),
                    None => {
                        if let Some(x) = last {
                            *v = Some(x);
                            filled += 1;
                        }
                    }
                }
            }
            let mut next = None;
            for v in col.values.iter_mut().rev() {
                match v {
                    Some(x) => next = Some(*x),
                    None => {
                        if let Some(x) = next {
                            *v = Some(x);
                            filled += 1;
                        }
                    }
                }
            }
        }
        Ok(filled)
    }

    /// Appends one lagged copy of `source_column` per requested lag: the new
    /// column holds, at row t, the source value at t − lag. The first
    /// max(lags) rows become unusable. Lag columns are named
    /// `{source}_lag{k}`.
    pub fn add_lag_features(&mut self, source_column: &str, lags: &[usize]) -> Result<()> {
        if lags.is_empty() {
            return Err(Error::Argument("no lags requested".into()));
        }
        if let Some(&bad) = lags.iter().find(|&&l| l == 0) {
            return Err(Error::Argument(format!("lag must be >= 1, got {bad}")));
        }
        if let Some(&bad) = lags.iter().find(|&&l| l >= self.n_rows()) {
            return Err(Error::Argument(format!(
                "lag {bad} is not smaller than the table length {}",
                self.n_rows()
            )));
        }
        let source = self.column(source_column)?.values.clone();
        for &lag in lags {
            let mut values = vec![None; self.n_rows()];
            values[lag..].copy_from_slice(&source[..self.n_rows() - lag]);
            self.columns.push(Column {
                name: lag_column_name(source_column, lag),
                values,
            });
        }
        let max_lag = *lags.iter().max().unwrap();
        self.usable_from = self.usable_from.max(max_lag);
        Ok(())
    }

    /// Writes the table in the crate's CSV dialect; gaps become empty cells.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("timestamp");
        for col in &self.columns {
            out.push(',');
            out.push_str(&col.name);
        }
        out.push('\n');
        for (r, ts) in self.timestamps.iter().enumerate() {
            out.push_str(&ts.to_string());
            for col in &self.columns {
                out.push(',');
                if let Some(v) = col.values[r] {
                    out.push_str(&format!("{v}"));
                }
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Name given to the lagged copy of a column.
pub fn lag_column_name(source: &str, lag: usize) -> String {
    format!("{source}_lag{lag}")
}

/// Loads a CSV file, checking that every schema column is present. Cells
/// that are blank or fail to parse are recorded as gaps for later
/// imputation.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<SeriesTable> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = raw.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Data(format!("{}: empty file", path.display())))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names.len() < 2 {
        return Err(Error::Schema(
            "header needs a timestamp column plus at least one series".into(),
        ));
    }
    for required in schema.required_columns() {
        if !names[1..].contains(&required) {
            return Err(Error::Schema(format!(
                "{}: missing column {required}",
                path.display()
            )));
        }
    }

    let mut timestamps = Vec::new();
    let mut columns: Vec<Column> = names[1..]
        .iter()
        .map(|n| Column {
            name: n.to_string(),
            values: Vec::new(),
        })
        .collect();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(Error::Data(format!(
                "{}: row {} has {} fields, header has {}",
                path.display(),
                lineno + 2,
                fields.len(),
                names.len()
            )));
        }
        timestamps.push(Timestamp::parse(fields[0]));
        for (col, field) in columns.iter_mut().zip(&fields[1..]) {
            let parsed = field.parse::<f64>().ok().filter(|v| v.is_finite());
            col.values.push(parsed);
        }
    }
    if timestamps.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    SeriesTable::new(timestamps, columns)
}
