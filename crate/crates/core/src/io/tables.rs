//! Plot-ready CSV tables keyed by step.
//!
//! Every table starts with a header row and a `step` column. Numbers are
//! written with [`format_float`], so every table parses back to the same
//! values.

use std::path::Path;

use super::number::format_float;
use super::{read_to_string, write_string, IoError};
use crate::observables::{Distribution, PeakFit, VarianceSeries};

/// Largest raw deviation of a probability row sum from 1 accepted on ingest.
pub const INGEST_SUM_TOLERANCE: f64 = 1e-3;

/// A numeric CSV table with a leading integer `step` column.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTable {
    pub columns: Vec<String>,
    pub steps: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    /// One-based file line of every row, for error messages.
    pub lines: Vec<usize>,
}

impl StepTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            steps: Vec::new(),
            rows: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, step: usize, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.lines.push(self.steps.len() + 2);
        self.steps.push(step);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("step").chain(self.columns.iter().map(String::as_str));
        w.write_record(header).expect("in-memory write");
        for (step, row) in self.steps.iter().zip(&self.rows) {
            let record = std::iter::once(step.to_string()).chain(row.iter().map(|&x| format_float(x)));
            w.write_record(record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }

    pub fn from_csv(text: &str, label: &str) -> Result<Self, IoError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| IoError::schema(label, 1, e.to_string()))?
            .clone();
        if header.get(0) != Some("step") {
            return Err(IoError::schema(label, 1, "first column must be `step`"));
        }
        let mut table = StepTable::new(header.iter().skip(1).map(str::to_string).collect());
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                IoError::schema(label, line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let step: usize = record[0]
                .parse()
                .map_err(|_| IoError::schema(label, line, format!("bad step `{}`", &record[0])))?;
            let row = record
                .iter()
                .skip(1)
                .map(|cell| {
                    cell.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| IoError::schema(label, line, format!("bad number `{cell}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.steps.push(step);
            table.rows.push(row);
            table.lines.push(line);
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        write_string(path, &self.to_csv())
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        Self::from_csv(&read_to_string(path)?, &path.display().to_string())
    }
}

fn probability_columns(width: usize) -> Vec<String> {
    (1..=width).map(|i| format!("p{i}")).collect()
}

/// `step,p1,…,pK` rows.
pub fn distributions_table(dists: &[Distribution]) -> StepTable {
    let width = dists.first().map_or(0, Distribution::len);
    let mut t = StepTable::new(probability_columns(width));
    for d in dists {
        t.push(d.step(), d.probabilities().to_vec());
    }
    t
}

/// Reads `step,p1,…,pK` rows, renormalizing each row to unit sum.
///
/// Rows whose raw sum is more than [`INGEST_SUM_TOLERANCE`] away from 1,
/// or with negative entries, are rejected.
pub fn distributions_from_table(table: &StepTable, label: &str) -> Result<Vec<Distribution>, IoError> {
    let width = table.columns.len();
    if width == 0 || table.columns != probability_columns(width) {
        return Err(IoError::schema(label, 1, "header must be `step,p1,…,pK`"));
    }
    let mut out = Vec::with_capacity(table.rows.len());
    for ((&step, row), &line) in table.steps.iter().zip(&table.rows).zip(&table.lines) {
        if row.len() != width {
            return Err(IoError::schema(label, line, "row width differs from header"));
        }
        if let Some(x) = row.iter().find(|&&x| x < 0.0) {
            return Err(IoError::schema(label, line, format!("negative probability {x}")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > INGEST_SUM_TOLERANCE {
            return Err(IoError::schema(
                label,
                line,
                format!("row sums to {sum}, more than {INGEST_SUM_TOLERANCE} away from 1"),
            ));
        }
        let probs = row.iter().map(|x| x / sum).collect();
        let dist = Distribution::new(probs, step).map_err(|e| IoError::schema(label, line, e.to_string()))?;
        out.push(dist);
    }
    Ok(out)
}

pub fn read_distributions(path: &Path) -> Result<Vec<Distribution>, IoError> {
    let label = path.display().to_string();
    distributions_from_table(&StepTable::read(path)?, &label)
}

/// `step,variance,mean_position`.
pub fn variance_table(series: &VarianceSeries) -> StepTable {
    let mut t = StepTable::new(vec!["variance".into(), "mean_position".into()]);
    for (i, (&v, &m)) in series.values().iter().zip(series.means()).enumerate() {
        t.push(series.first_step() + i, vec![v, m]);
    }
    t
}

/// Pulls a variance series out of any step table. Without an explicit
/// column name, `variance` is used, then `central_variance`.
pub fn variance_from_table(
    table: &StepTable,
    column: Option<&str>,
    label: &str,
) -> Result<VarianceSeries, IoError> {
    let name = match column {
        Some(c) => c.to_string(),
        None => ["variance", "central_variance"]
            .into_iter()
            .find(|c| table.columns.iter().any(|h| h == c))
            .ok_or_else(|| IoError::schema(label, 1, "no `variance` or `central_variance` column"))?
            .to_string(),
    };
    let values = table
        .column(&name)
        .ok_or_else(|| IoError::schema(label, 1, format!("no column `{name}`")))?;
    let first = table.steps.first().copied().unwrap_or(0);
    for (i, (&step, &line)) in table.steps.iter().zip(&table.lines).enumerate() {
        if step != first + i {
            return Err(IoError::schema(label, line, format!("steps must be consecutive, got {step}")));
        }
    }
    let means = table.column("mean_position").unwrap_or_else(|| vec![0.0; values.len()]);
    Ok(VarianceSeries::from_parts(first, values, means))
}

/// `step,order` for each peak.
pub fn peaks_table(fit: &PeakFit) -> StepTable {
    let mut t = StepTable::new(vec!["order".into()]);
    for (&step, &order) in fit.steps.iter().zip(&fit.orders) {
        t.push(step, vec![order as f64]);
    }
    t
}

/// Single-row `slope,intercept,residual_norm` file.
pub fn fit_csv(slope: f64, intercept: f64, residual_norm: f64) -> String {
    format!(
        "slope,intercept,residual_norm\n{},{},{}\n",
        format_float(slope),
        format_float(intercept),
        format_float(residual_norm)
    )
}
