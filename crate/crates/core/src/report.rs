//! Tabular reports written as CSV or JSON.

use std::io::{self, Write};

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(x) => Value::from(x),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-5 <= |v| < 1e17`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            sign,
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Cell in the first row whose `key_column` equals `key`.
    pub fn lookup(&self, key_column: &str, key: &Cell, column: &str) -> Option<&Cell> {
        let kc = self.columns.iter().position(|c| c == key_column)?;
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.iter().find(|r| &r[kc] == key).map(|r| &r[c])
    }
}

/// Effective configuration, scalar results and tables of one command.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub config: Vec<(String, Cell)>,
    pub summary: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            ..Self::default()
        }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Cell>) {
        self.config.push((key.into(), value.into()));
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_value(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# command={}", self.command)?;
        for (k, v) in &self.config {
            writeln!(out, "# config.{k}={}", v.csv())?;
        }
        for (k, v) in &self.summary {
            writeln!(out, "# {k}={}", v.csv())?;
        }
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "# table={}", t.name)?;
            writeln!(out, "{}", t.columns.join(","))?;
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let pairs = |kv: &[(String, Cell)]| -> Value {
            Value::Object(kv.iter().map(|(k, v)| (k.clone(), v.json())).collect())
        };
        let mut tables = Map::new();
        for t in &self.tables {
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    Value::Object(
                        t.columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.clone(), v.json()))
                            .collect(),
                    )
                })
                .collect();
            tables.insert(t.name.clone(), Value::Array(rows));
        }
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        root.insert("config".into(), pairs(&self.config));
        root.insert("summary".into(), pairs(&self.summary));
        root.insert("tables".into(), Value::Object(tables));
        Value::Object(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_real(43.0), "43");
        assert_eq!(format_real(0.1), "0.10000000000000001");
        assert_eq!(format_real(0.25), "0.25");
        assert_eq!(format_real(4.0), "4");
        assert_eq!(format_real(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_real(1.5e20), "1.5e+20");
        assert_eq!(format_real(-2.5), "-2.5");
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(f64::NAN), "NaN");
    }

    #[test]
    fn formatted_reals_round_trip() {
        for v in [
            std::f64::consts::PI,
            1.0 / 3.0,
            2.0f64.sqrt() * 1e-9,
            6.02e23,
            0.2610163784954939,
        ] {
            assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_and_json_layout() {
        let mut r = Report::new("demo");
        r.config("K", 2u32);
        r.summary("R", 4.0);
        let mut t = Table::new("zeta", &["k", "zeta_k"]);
        t.push(vec![1u32.into(), 3.0.into()]);
        t.push(vec![2u32.into(), 1.0.into()]);
        r.tables.push(t);
        let mut buf = Vec::new();
        r.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# command=demo\n# config.K=2\n# R=4\n# table=zeta\nk,zeta_k\n1,3\n2,1\n"
        );
        let j = r.to_json();
        assert_eq!(j["tables"]["zeta"][0]["zeta_k"], 3.0);
        assert_eq!(j["summary"]["R"], 4.0);
        assert_eq!(
            r.table("zeta")
                .unwrap()
                .lookup("k", &Cell::Int(2), "zeta_k"),
            Some(&Cell::Real(1.0))
        );
    }
}
