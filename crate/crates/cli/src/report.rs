//! Report model and the two serializations.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) in both formats, so
//! a JSON and a CSV report of the same run carry byte-identical numbers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Canonical text, shared by both formats.
    pub fn text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in section {}", self.name);
        self.rows.push(row);
    }
}

/// One pass/fail comparison. `relation` names the identity being checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub relation: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tol`; NaN never passes.
    pub fn at_most(suite: &str, name: impl Into<String>, relation: &str, value: f64, tol: f64) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            relation: relation.into(),
            value,
            tol,
            pass: value <= tol,
        }
    }

    pub fn holds(suite: &str, name: impl Into<String>, relation: &str, ok: bool) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            relation: relation.into(),
            value: if ok { 0.0 } else { 1.0 },
            tol: 0.0,
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    /// Ordered `(key, value)` echo of the run configuration.
    pub config: Vec<(String, String)>,
    pub sections: Vec<Section>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn config_line(&self) -> String {
        let body: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# config: {}", body.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }

    pub fn label(self) -> &'static str {
        self.extension()
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum JsonCell {
    Raw(Box<RawValue>),
    Text(String),
    Bool(bool),
}

fn json_cell(c: &Cell) -> JsonCell {
    match c {
        Cell::Int(i) => JsonCell::Raw(RawValue::from_string(i.to_string()).expect("integer literal")),
        Cell::Num(x) if x.is_finite() => JsonCell::Raw(RawValue::from_string(fmt_num(*x)).expect("float literal")),
        Cell::Num(x) => JsonCell::Text(fmt_num(*x)),
        Cell::Text(s) => JsonCell::Text(s.clone()),
        Cell::Bool(b) => JsonCell::Bool(*b),
    }
}

#[derive(Serialize)]
struct JsonConfigEntry<'a> {
    key: &'a str,
    value: &'a str,
}

#[derive(Serialize)]
struct JsonSection<'a> {
    name: &'a str,
    columns: &'a [String],
    rows: Vec<Vec<JsonCell>>,
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    suite: &'a str,
    name: &'a str,
    relation: &'a str,
    value: JsonCell,
    tol: JsonCell,
    pass: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a str,
    config: Vec<JsonConfigEntry<'a>>,
    passed: bool,
    sections: Vec<JsonSection<'a>>,
    checks: Vec<JsonCheck<'a>>,
}

pub fn to_json(r: &Report) -> String {
    let doc = JsonReport {
        command: &r.command,
        config: r
            .config
            .iter()
            .map(|(k, v)| JsonConfigEntry { key: k, value: v })
            .collect(),
        passed: r.passed(),
        sections: r
            .sections
            .iter()
            .map(|s| JsonSection {
                name: &s.name,
                columns: &s.columns,
                rows: s.rows.iter().map(|row| row.iter().map(json_cell).collect()).collect(),
            })
            .collect(),
        checks: r
            .checks
            .iter()
            .map(|c| JsonCheck {
                suite: &c.suite,
                name: &c.name,
                relation: &c.relation,
                value: json_cell(&Cell::Num(c.value)),
                tol: json_cell(&Cell::Num(c.tol)),
                pass: c.pass,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// Long-format CSV: one `section,row,column,value` record per cell, after a
/// `# config` comment line. Checks form the `checks` section.
pub fn to_csv(r: &Report) -> Result<String, csv::Error> {
    let mut out = Vec::new();
    writeln!(out, "{}", r.config_line()).expect("write to memory");
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["section", "row", "column", "value"])?;
        for s in &r.sections {
            for (i, row) in s.rows.iter().enumerate() {
                for (col, cell) in s.columns.iter().zip(row) {
                    w.write_record([s.name.as_str(), &i.to_string(), col, &cell.text()])?;
                }
            }
        }
        for (i, c) in r.checks.iter().enumerate() {
            let idx = i.to_string();
            let fields = [
                ("suite", c.suite.clone()),
                ("name", c.name.clone()),
                ("relation", c.relation.clone()),
                ("value", fmt_num(c.value)),
                ("tol", fmt_num(c.tol)),
                ("pass", c.pass.to_string()),
            ];
            for (col, v) in fields {
                w.write_record(["checks", idx.as_str(), col, &v])?;
            }
        }
        w.flush()?;
    }
    Ok(String::from_utf8(out).expect("csv output is UTF-8"))
}

pub fn render(r: &Report, format: Format) -> Result<String, csv::Error> {
    match format {
        Format::Json => Ok(to_json(r)),
        Format::Csv => to_csv(r),
    }
}

#[derive(Debug)]
pub struct EmitError {
    pub path: PathBuf,
    pub message: String,
}

impl std::fmt::Display for EmitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot write report to {}: {}", self.path.display(), self.message)
    }
}

/// Write the report to `path` in `format`.
pub fn emit_report(r: &Report, format: Format, path: &Path) -> Result<(), EmitError> {
    let err = |message: String| EmitError {
        path: path.to_path_buf(),
        message,
    };
    let text = render(r, format).map_err(|e| err(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut s = Section::new("t", &["n", "value", "label"]);
        s.push(vec![Cell::Int(3), Cell::Num(5.25), Cell::from("a, \"b\"")]);
        Report {
            command: "qnum".into(),
            config: vec![("q".into(), "0.5".into())],
            sections: vec![s],
            checks: vec![Check::at_most("qnum", "x", "rel", 1e-13, 1e-12)],
        }
    }

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(fmt_num(5.25), "5.2500000000000000e0");
        assert_eq!(fmt_num(-1e-300), "-1.0000000000000000e-300");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn empty_report_is_header_only_csv() {
        let r = Report {
            command: "x".into(),
            config: vec![("q".into(), "0.5".into())],
            ..Default::default()
        };
        assert_eq!(to_csv(&r).unwrap(), "# config: q=0.5\nsection,row,column,value\n");
    }

    #[test]
    fn csv_quotes_fields() {
        let csv = to_csv(&sample()).unwrap();
        assert!(csv.contains("t,0,label,\"a, \"\"b\"\"\"\n"));
        assert!(csv.contains("t,0,value,5.2500000000000000e0\n"));
    }

    #[test]
    fn json_is_valid_and_ordered() {
        let j = to_json(&sample());
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["sections"][0]["rows"][0][1].as_f64(), Some(5.25));
        let keys = ["\"command\"", "\"config\"", "\"passed\"", "\"sections\"", "\"checks\""];
        let pos: Vec<usize> = keys.iter().map(|k| j.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(j.contains("5.2500000000000000e0"));
    }

    #[test]
    fn failing_nan_check() {
        assert!(!Check::at_most("s", "n", "r", f64::NAN, 1.0).pass);
    }
}
