//! Tabular output: CSV with `# key=value` header lines, or the same content
//! as JSON.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::revival::SampledSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(i) => i as f64,
            Cell::Float(x) => x,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            // 17 significant digits round-trip every f64
            Cell::Float(x) => write!(f, "{x:.16e}"),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Float(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Float(x) => s.serialize_str(&x.to_string()),
        }
    }
}

/// A header plus named columns of rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

struct OrderedHeader<'a>(&'a [(String, String)]);

impl Serialize for OrderedHeader<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Table {
    pub fn new(header: Vec<(String, String)>, columns: &[&str]) -> Self {
        Self {
            header,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(header: Vec<(String, String)>, columns: Vec<String>) -> Self {
        Self {
            header,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut columns = None;
        for line in lines.by_ref() {
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("malformed header line '{line}'")))?;
                table.header.push((k.trim().to_string(), v.to_string()));
            } else {
                columns = Some(line);
                break;
            }
        }
        let columns = columns.ok_or_else(|| Error::Config("CSV has no column row".into()))?;
        table.columns = columns.split(',').map(|c| c.trim().to_string()).collect();
        for line in lines {
            let row = line
                .split(',')
                .map(|c| parse_cell(c.trim()))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != table.columns.len() {
                return Err(Error::Config(format!(
                    "row has {} cells, expected {}",
                    row.len(),
                    table.columns.len()
                )));
            }
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = json!({
            "header": OrderedHeader(&self.header),
            "columns": self.columns,
            "rows": self.rows,
        });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        let bad = |what: &str| Error::Config(format!("JSON table: {what}"));
        let header = doc["header"]
            .as_object()
            .ok_or_else(|| bad("missing header object"))?
            .iter()
            .map(|(k, v)| (k.clone(), v.as_str().unwrap_or_default().to_string()))
            .collect();
        let columns = doc["columns"]
            .as_array()
            .ok_or_else(|| bad("missing columns"))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| bad("non-string column")))
            .collect::<Result<Vec<_>>>()?;
        let rows = doc["rows"]
            .as_array()
            .ok_or_else(|| bad("missing rows"))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("row is not an array"))?
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) if n.is_i64() => Ok(Cell::Int(n.as_i64().unwrap_or_default())),
                        Value::Number(n) => Ok(Cell::Float(n.as_f64().unwrap_or(f64::NAN))),
                        Value::String(s) => parse_cell(s),
                        _ => Err(bad("unexpected cell")),
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { header, columns, rows })
    }

    /// Writes `dir/stem.{csv,json}` and returns the path.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{stem}.{}", format.extension()));
        let text = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json()?,
        };
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_csv(&text),
        }
    }
}

fn parse_cell(s: &str) -> Result<Cell> {
    if !s.contains(['.', 'e', 'E', 'n', 'N', 'i']) {
        if let Ok(i) = s.parse::<i64>() {
            return Ok(Cell::Int(i));
        }
    }
    s.parse::<f64>()
        .map(Cell::Float)
        .map_err(|_| Error::Config(format!("cannot parse cell '{s}'")))
}

/// Signal as a two-column table `(t, abs_a_sq)`.
pub fn signal_table(signal: &SampledSignal, header: Vec<(String, String)>) -> Table {
    let mut t = Table::new(header, &["t", "abs_a_sq"]);
    for (i, v) in signal.values.iter().enumerate() {
        t.push(vec![signal.time(i).into(), (*v).into()]);
    }
    t
}

/// Reads a table written by [`signal_table`] back into a signal. The step is
/// taken from the first two time stamps.
pub fn signal_from_table(table: &Table) -> Result<SampledSignal> {
    let t = table
        .column("t")
        .ok_or_else(|| Error::Config("signal table lacks column 't'".into()))?;
    let v = table
        .column("abs_a_sq")
        .ok_or_else(|| Error::Config("signal table lacks column 'abs_a_sq'".into()))?;
    if t.len() < 2 {
        return Err(Error::Config("signal table needs at least two rows".into()));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    SampledSignal::new(t[0], dt, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(
            vec![("a".into(), "4.4".into()), ("note".into(), "x = y".into())],
            &["n", "value"],
        );
        t.push(vec![Cell::Int(3), Cell::Float(0.1)]);
        t.push(vec![Cell::Int(-4), Cell::Float(-1.234_567_890_123_456_7e-300)]);
        t.push(vec![Cell::Int(5), Cell::Float(std::f64::consts::PI)]);
        t
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let t = sample();
        let text = t.to_csv();
        assert!(text.starts_with("# a=4.4\n# note=x = y\nn,value\n3,1.0000000000000001e-1\n"));
        let back = Table::from_csv(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn json_round_trip() {
        let t = sample();
        let back = Table::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back.rows, t.rows);
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.header_value("note"), Some("x = y"));
    }

    #[test]
    fn signal_round_trip_through_file() {
        let values: Vec<f64> = (0..500).map(|i| ((i as f64) * 0.37).sin().powi(2) / 3.0).collect();
        let sig = SampledSignal::new(-15.0, 15.004 / 32.0, values).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = signal_table(&sig, vec![("j".into(), "10".into())])
            .write(dir.path(), "signal", Format::Csv)
            .unwrap();
        let back = signal_from_table(&Table::read(&path).unwrap()).unwrap();
        assert_eq!(back.values, sig.values);
        assert_eq!(back.t_start, sig.t_start);
        assert!((back.dt - sig.dt).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Table::from_csv("# a=1\n").is_err());
        assert!(Table::from_csv("x,y\n1,2,3\n").is_err());
        assert!(Table::from_csv("x\nabc\n").is_err());
        assert!("xml".parse::<Format>().is_err());
    }
}
