use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HarnessError, StudyKind};
use crate::record::{RunRecord, RunSummary};
use crate::solver::{PreconditionerMode, Scheme};

/// One table cell. Floats are written with 17 significant digits in CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => format!("{v:.16e}"),
            Value::Text(s) => s.clone(),
            Value::Empty => String::new(),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Empty, Value::Float)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }
}

/// A fitted scalar, e.g. a convergence exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub name: String,
    pub value: f64,
}

/// One integration with its per-step records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub n: usize,
    pub scheme: Scheme,
    pub preconditioner: PreconditionerMode,
    pub summary: RunSummary,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutput {
    pub study: StudyKind,
    pub seed: u64,
    /// True when a run failed and only the completed runs are present.
    pub partial: bool,
    pub fits: Vec<Fit>,
    pub tables: Vec<Table>,
    pub runs: Vec<RunOutput>,
}

impl StudyOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<f64> {
        self.fits.iter().find(|f| f.name == name).map(|f| f.value)
    }

    /// Per-step records of every run, flattened.
    pub fn records_table(&self) -> Table {
        let mut t = Table::new("records", &RECORD_COLUMNS);
        for run in &self.runs {
            for r in &run.records {
                t.push(vec![
                    run.n.into(),
                    run.scheme.label().into(),
                    run.preconditioner.label().into(),
                    r.step.into(),
                    r.t.into(),
                    r.newton_iterations.into(),
                    r.gmres_min.into(),
                    r.gmres_avg.into(),
                    r.gmres_max.into(),
                    r.inner_cycles_avg.into(),
                    r.l1_error.into(),
                    r.linf_error.into(),
                    r.front.into(),
                ]);
            }
        }
        t
    }

    pub fn fits_table(&self) -> Table {
        let mut t = Table::new("fits", &["name", "value"]);
        for f in &self.fits {
            t.push(vec![f.name.as_str().into(), f.value.into()]);
        }
        t
    }
}

pub const RECORD_COLUMNS: [&str; 13] = [
    "n",
    "scheme",
    "preconditioner",
    "step",
    "t",
    "newton_iterations",
    "gmres_min",
    "gmres_avg",
    "gmres_max",
    "inner_cycles_avg",
    "l1_error",
    "linf_error",
    "front",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Header row plus one line per row, `\n`-terminated.
pub fn table_to_csv(table: &Table) -> Result<String, HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| HarnessError::Io {
        path: PathBuf::from(format!("{}.csv", table.name)),
        source: e.into(),
    };
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Value::csv)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io {
        path: PathBuf::from(format!("{}.csv", table.name)),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn to_json_string(out: &StudyOutput) -> String {
    serde_json::to_string_pretty(out).expect("study output serialises")
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, HarnessError> {
    std::fs::write(&path, contents).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `out` into `dir` and returns the created files.
///
/// CSV: one file per table plus `records.csv` and `fits.csv`. JSON: a
/// single `<study>.json` holding everything.
pub fn write_output(
    out: &StudyOutput,
    dir: &Path,
    format: Format,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Invalid {
        key: "output".into(),
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    match format {
        Format::Json => Ok(vec![write_file(
            dir.join(format!("{}.json", out.study.label())),
            &to_json_string(out),
        )?]),
        Format::Csv => {
            let mut files = Vec::new();
            for table in out
                .tables
                .iter()
                .cloned()
                .chain([out.records_table(), out.fits_table()])
            {
                files.push(write_file(
                    dir.join(format!("{}.csv", table.name)),
                    &table_to_csv(&table)?,
                )?);
            }
            Ok(files)
        }
    }
}
