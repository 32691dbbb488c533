use serde_json::{Map, Value};

use isoladder::C64;

/// `{:.16e}`, i.e. 17 significant digits; identical input gives identical text.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A JSON number with the digits of [`fmt_f64`] (serde writes the exponent
/// sign explicitly); non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt_f64(x)).expect("formatted float is a JSON number")
    } else {
        Value::Null
    }
}

pub fn complex(z: C64) -> Value {
    obj([("re", num(z.re)), ("im", num(z.im))])
}

pub fn obj<const K: usize>(entries: [(&str, Value); K]) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

pub fn nums(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(num).collect())
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => num(*x),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Header line plus one line per row, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    /// One object per row keyed by the header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (h, c) in self.header.iter().zip(row) {
                        m.insert(h.to_string(), c.to_json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(-2.0).to_string(), "-2.0000000000000000e+0");
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(complex(C64::new(1.0, -0.5)).to_string(), r#"{"im":-5.0000000000000000e-1,"re":1.0000000000000000e+0}"#);
    }

    #[test]
    fn csv_quoting() {
        let mut t = Table::new(vec!["name", "value"]);
        t.push(vec![Cell::Text("a, b".into()), Cell::Float(1.5)]);
        assert_eq!(t.to_csv(), "name,value\n\"a, b\",1.5000000000000000e0\n");
    }
}
