use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
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

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// How a figure table should be drawn by the generated gnuplot script.
#[derive(Debug, Clone, PartialEq)]
pub enum Plot {
    /// `ys` against `x`, one curve per distinct value of `group` if set.
    Lines { x: usize, ys: Vec<usize>, group: Option<(usize, Vec<f64>)> },
    Points { x: usize, ys: Vec<usize> },
    Map { x: usize, y: usize, z: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem when written into a directory.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar results, written as extra `#` lines.
    pub notes: Vec<(String, Cell)>,
    pub plot: Option<Plot>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.notes.push((key.to_string(), value.into()));
    }

    pub fn with_plot(mut self, plot: Plot) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn to_csv(&self, header: &str) -> Vec<u8> {
        let mut out = Vec::new();
        writeln!(out, "# {header}").unwrap();
        for (k, v) in &self.notes {
            writeln!(out, "# {k}={}", v.render()).unwrap();
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns).unwrap();
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render)).unwrap();
            }
            w.flush().unwrap();
        }
        out
    }

    pub fn to_json(&self, header: &str, flags: &Value) -> Vec<u8> {
        let notes: Map<String, Value> = self.notes.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({
            "generator": header,
            "flags": flags,
            "notes": notes,
            "columns": self.columns,
            "rows": rows,
        });
        let mut out = serde_json::to_vec_pretty(&doc).unwrap();
        out.push(b'\n');
        out
    }

    pub fn gnuplot(&self, data_file: &str) -> String {
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str("set datafile commentschars '#'\n");
        s.push_str(&format!("set title '{}' noenhanced\n", self.name));
        let col = |i: usize| format!("'{}'", self.columns[i]);
        match &self.plot {
            None => {}
            Some(Plot::Lines { x, ys, group }) => {
                s.push_str(&format!("set xlabel {}\n", col(*x)));
                let mut parts = Vec::new();
                for &y in ys {
                    match group {
                        None => parts.push(format!(
                            "'{data_file}' using {}:{} with lines title {}",
                            x + 1,
                            y + 1,
                            col(y)
                        )),
                        Some((g, values)) => {
                            for v in values {
                                let v = fmt_num(*v);
                                parts.push(format!(
                                    "'{data_file}' using {}:(${} == {v} ? ${} : NaN) with lines title '{} {}={v}' noenhanced",
                                    x + 1,
                                    g + 1,
                                    y + 1,
                                    self.columns[y],
                                    self.columns[*g]
                                ));
                            }
                        }
                    }
                }
                s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
            }
            Some(Plot::Points { x, ys }) => {
                s.push_str(&format!("set xlabel {}\n", col(*x)));
                let parts: Vec<String> = ys
                    .iter()
                    .map(|&y| format!("'{data_file}' using {}:{} with points pt 7 ps 0.3 title {}", x + 1, y + 1, col(y)))
                    .collect();
                s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
            }
            Some(Plot::Map { x, y, z }) => {
                s.push_str(&format!("set xlabel {}\nset ylabel {}\n", col(*x), col(*y)));
                s.push_str("set view map\nset pm3d map\n");
                s.push_str(&format!("splot '{data_file}' using {}:{}:{} with points pt 5 palette title {}\n", x + 1, y + 1, z + 1, col(*z)));
            }
        }
        s.push_str("pause mouse close\n");
        s
    }
}

/// Twelve significant digits, fixed notation for moderate magnitudes.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(4.0 / 9.0), "0.444444444444");
        assert_eq!(fmt_num(-2.5e-7), "-2.5e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(9.9999999999996), "10");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![Cell::Num(0.5), Cell::Empty]);
        t.note("k", 2.0);
        let text = String::from_utf8(t.to_csv("lossprobe x")).unwrap();
        assert_eq!(text, "# lossprobe x\n# k=2\na,b\n0.5,\n");
    }

    #[test]
    fn json_nan_is_null() {
        let mut t = Table::new("t", &["a"]);
        t.push(vec![Cell::Num(f64::NAN)]);
        let v: Value = serde_json::from_slice(&t.to_json("h", &Value::Null)).unwrap();
        assert_eq!(v["rows"][0][0], Value::Null);
    }
}
