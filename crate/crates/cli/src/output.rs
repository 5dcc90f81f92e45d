//! Tables and their CSV / JSON encodings.
//!
//! Floats are written in shortest round-trip form with a '.' decimal point,
//! the same text in both formats. Missing values are empty in CSV and `null`
//! in JSON.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;
use crate::experiments::{ChernTrial, MistakeRow, PhaseTrial};

pub const ARTIFACT: &str = "holonomy-cli";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn to_json(&self) -> Value {
        match *self {
            Cell::Int(v) => v.into(),
            Cell::Float(v) => serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => v.into(),
            Cell::Empty => Value::Null,
        }
    }

    fn to_text(&self) -> String {
        match self.to_json() {
            Value::Null => String::new(),
            v => v.to_string(),
        }
    }
}

impl<T: Into<Cell>, E> From<Result<T, E>> for Cell {
    fn from(r: Result<T, E>) -> Self {
        r.map_or(Cell::Empty, Into::into)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Σn for `nfield`: a trailing `sum` row in CSV, a `sum` key in JSON.
    pub sum: Option<i64>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            sum: None,
        }
    }

    pub fn write<W: Write>(&self, cfg: &ExperimentConfig, w: W) -> Result<(), CliError> {
        match cfg.format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(cfg, w),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::to_text)).map_err(csv_err)?;
        }
        if let Some(sum) = self.sum {
            let mut rec = vec![String::new(); self.columns.len()];
            rec[0] = "sum".into();
            rec[self.columns.len() - 1] = sum.to_string();
            out.write_record(&rec).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self, cfg: &ExperimentConfig) -> Value {
        let mut meta = Map::new();
        meta.insert("artifact".into(), ARTIFACT.into());
        meta.insert("artifact_version".into(), ARTIFACT_VERSION.into());
        meta.insert("columns".into(), self.columns.clone().into());
        meta.insert("config".into(), cfg.echo());
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert("records".into(), records.into());
        if let Some(sum) = self.sum {
            top.insert("sum".into(), sum.into());
        }
        Value::Object(top)
    }

    pub fn write_json<W: Write>(&self, cfg: &ExperimentConfig, mut w: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut w, &self.to_json(cfg)).map_err(std::io::Error::other)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

pub fn chern_table(trials: &[ChernTrial]) -> Table {
    let mut t = Table::new(&["mu", "trial", "C", "admissible", "residual"]);
    for tr in trials {
        let r = tr.outcome.as_ref();
        t.rows.push(vec![
            tr.mu.into(),
            tr.trial.into(),
            r.map(|r| r.chern).into(),
            r.map(|r| r.admissible).into(),
            r.map(|r| r.residual).into(),
        ]);
    }
    t
}

pub fn mistake_table(rows: &[MistakeRow]) -> Table {
    let mut t = Table::new(&["eps1", "mistakes", "trials", "ratio"]);
    for r in rows {
        t.rows.push(vec![r.eps1.into(), r.mistakes.into(), r.trials.into(), r.ratio().into()]);
    }
    t
}

pub fn nfield_table(r: &holonomy::ChernResult64) -> Table {
    let mut t = Table::new(&["i", "j", "n"]);
    for (i, j) in r.mesh.indices() {
        t.rows.push(vec![i.into(), j.into(), r.n_at(i, j).into()]);
    }
    t.sum = Some(r.n.iter().sum());
    t
}

pub fn phase_table(trials: &[PhaseTrial], phase_column: &'static str) -> Table {
    let mut t = Table::new(&["ky", "trial", phase_column, "winding"]);
    for tr in trials {
        let w = tr.winding.as_ref().map(|w| *w);
        for (ky, phi) in tr.ky.iter().zip(&tr.phi) {
            t.rows.push(vec![(*ky).into(), tr.trial.into(), phi.as_ref().map(|p| *p).into(), w.into()]);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_render_identically_in_both_formats() {
        assert_eq!(Cell::Float(1.9).to_text(), "1.9");
        assert_eq!(Cell::Float(-2.0).to_text(), "-2.0");
        assert_eq!(Cell::Float(1e-17).to_text(), "1e-17");
        assert_eq!(Cell::Float(f64::NAN).to_text(), "");
        assert_eq!(Cell::Int(-3).to_text(), "-3");
        assert_eq!(Cell::Bool(true).to_text(), "true");
        assert_eq!(Cell::Empty.to_json(), Value::Null);
    }

    #[test]
    fn csv_uses_lf_and_sum_row() {
        let mut t = Table::new(&["i", "j", "n"]);
        t.rows.push(vec![Cell::Int(0), Cell::Int(0), Cell::Int(1)]);
        t.sum = Some(1);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "i,j,n\n0,0,1\nsum,,1\n");
    }
}
