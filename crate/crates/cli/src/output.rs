//! Report and CSV writers. Numbers carry 17 significant digits so every
//! double round-trips; field order is insertion order.

use std::fs;
use std::path::{Path, PathBuf};

use loewner_core::holomap::{CVec, Jet};
use loewner_core::linalg::CMatrix;

/// `x` with 17 significant digits (`inf`/`nan` spelled as in TOML).
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Num(f64),
    Int(i64),
    Bool(bool),
    Nums(Vec<f64>),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Str(s) => toml::Value::String(s.clone()).to_string(),
            Value::Num(x) => num(*x),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Nums(xs) => format!("[{}]", xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Value {
        Value::Str(s.into())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Value {
        Value::Str(s)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Value {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Value {
        Value::Int(i as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Value {
        Value::Bool(b)
    }
}

impl From<Vec<f64>> for Value {
    fn from(xs: Vec<f64>) -> Value {
        Value::Nums(xs)
    }
}

/// A TOML document with top-level keys followed by named sections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    sections: Vec<(String, Vec<(String, Value)>)>,
}

impl Report {
    pub fn new() -> Report {
        Report {
            sections: vec![(String::new(), Vec::new())],
        }
    }

    /// Sets a top-level key.
    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.sections[0].1.push((key.into(), v.into()));
        self
    }

    /// Appends to section `name`, creating it on first use.
    pub fn put(&mut self, section: &str, key: &str, v: impl Into<Value>) -> &mut Self {
        match self.sections.iter_mut().find(|(n, _)| n == section) {
            Some((_, kv)) => kv.push((key.into(), v.into())),
            None => self.sections.push((section.into(), vec![(key.into(), v.into())])),
        }
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, kv) in &self.sections {
            if !name.is_empty() {
                out.push_str(&format!("\n[{name}]\n"));
            }
            for (k, v) in kv {
                out.push_str(&format!("{k} = {}\n", v.render()));
            }
        }
        out
    }
}

/// One CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(name: &str, header: &[S]) -> Table {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

/// Column names `{prefix}{k}_re, {prefix}{k}_im` for `k = 1..=n`.
pub fn complex_columns(prefix: &str, n: usize) -> Vec<String> {
    (1..=n)
        .flat_map(|k| [format!("{prefix}{k}_re"), format!("{prefix}{k}_im")])
        .collect()
}

pub fn complex_cells(v: &CVec) -> Vec<String> {
    v.iter().flat_map(|z| [num(z.re), num(z.im)]).collect()
}

/// Rows `(tag…, row, col, re, im)` of a matrix, 1-based.
pub fn matrix_rows(tag: &[String], m: &CMatrix) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let mut row = tag.to_vec();
            row.extend([(r + 1).to_string(), (c + 1).to_string(), num(m[(r, c)].re), num(m[(r, c)].im)]);
            out.push(row);
        }
    }
    out
}

pub fn jet_header(n: usize, tag: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = tag.iter().map(|s| s.to_string()).collect();
    h.push("component".into());
    h.extend((1..=n).map(|k| format!("a{k}")));
    h.extend(["re".to_string(), "im".to_string()]);
    h
}

/// Every coefficient of `jet` (zeros included), component 1-based.
pub fn jet_rows(tag: &[String], jet: &Jet) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for k in 0..jet.dim() {
        for alpha in jet.exponents() {
            let c = jet.coefficient(&alpha, k).expect("index from the same jet");
            let mut row = tag.to_vec();
            row.push((k + 1).to_string());
            row.extend(alpha.iter().map(|a| a.to_string()));
            row.extend([num(c.re), num(c.im)]);
            out.push(row);
        }
    }
    out
}

/// Writes `<stem>.report.toml` and `<stem>.<table>.csv` into `dir`.
pub fn write_all(dir: &Path, stem: &str, report: &Report, tables: &[Table]) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join(format!("{stem}.report.toml"));
    fs::write(&path, report.render())?;
    written.push(path);
    for t in tables {
        let path = dir.join(format!("{stem}.{}.csv", t.name));
        t.write(&path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn report_keeps_insertion_order() {
        let mut r = Report::new();
        r.set("b", 1usize).put("sec", "x", true).set("a", "s\"q");
        assert_eq!(r.render(), "b = 1\na = 's\"q'\n\n[sec]\nx = true\n");
        assert!(r.render().parse::<toml::Table>().is_ok());
    }
}
