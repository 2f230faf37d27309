//! CSV output.
//!
//! Floats are written with 12 significant digits in scientific notation,
//! integers verbatim and booleans as `1`/`0`. The last row starts with
//! `#summary` and holds per-column aggregates.

use std::io::Write;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.11e}"),
            Cell::Bool(b) => if *b { "1" } else { "0" }.to_string(),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Cell::Int(v) => *v as f64,
            Cell::Float(v) => *v,
            Cell::Bool(b) => f64::from(u8::from(*b)),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvReport {
    pub experiment: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Aggregates for every column but the first, which reads `#summary`.
    pub summary: Vec<Cell>,
    /// Short human-readable lines for the terminal.
    pub notes: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("row {row} has {got} cells, expected {expected}")]
    Shape { row: usize, got: usize, expected: usize },
    #[error("non-finite value in column `{column}`")]
    NonFinite { column: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CsvReport {
    pub fn check(&self) -> Result<(), ReportError> {
        let width = self.columns.len();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != width {
                return Err(ReportError::Shape { row: i, got: row.len(), expected: width });
            }
        }
        if self.summary.len() + 1 != width {
            return Err(ReportError::Shape { row: self.rows.len(), got: self.summary.len() + 1, expected: width });
        }
        let all = self.rows.iter().map(|r| r.as_slice()).chain(std::iter::once(&self.summary[..]));
        for row in all {
            let offset = width - row.len();
            for (j, cell) in row.iter().enumerate() {
                if let Cell::Float(v) = cell {
                    if !v.is_finite() {
                        return Err(ReportError::NonFinite { column: self.columns[j + offset].clone() });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), ReportError> {
        self.check()?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.write_record(std::iter::once("#summary".to_string()).chain(self.summary.iter().map(Cell::render)))?;
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, ReportError> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ascii"))
    }

    /// Long format: one `(experiment, row, column, value)` record per cell
    /// of the per-trial rows, with the first column used as the row key.
    pub fn write_long<W: Write>(&self, out: W) -> Result<(), ReportError> {
        self.check()?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["experiment", "row", "column", "value"])?;
        for row in &self.rows {
            let key = row[0].render();
            for (name, cell) in self.columns.iter().zip(row).skip(1) {
                w.write_record([self.experiment, key.as_str(), name.as_str(), cell.render().as_str()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
