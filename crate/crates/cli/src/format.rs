//! Number formatting shared by every output format.

use std::fmt::Write as _;

use serde::Serialize;

/// Decimal rendering with 12 significant digits and trailing zeros removed.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        return format!("{}e{exp}", trim(mantissa));
    }
    let decimals = (11 - magnitude).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to the digits [`fmt12`] prints, so JSON output carries the
/// same precision as text output.
pub fn round12(x: f64) -> f64 {
    fmt12(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// `key=value` lines
    Text,
    /// header row and one data row
    Csv,
    /// a single JSON object
    Json,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Num(x) => fmt12(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.clone(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

/// Ordered key/value report.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(&'static str, Value)>,
}

impl Report {
    pub fn push(&mut self, key: &'static str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key, value.into()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}={}", v.render());
                }
            }
            Format::Csv => {
                let keys: Vec<&str> = self.fields.iter().map(|f| f.0).collect();
                let vals: Vec<String> = self.fields.iter().map(|f| f.1.render()).collect();
                let _ = writeln!(out, "{}\n{}", keys.join(","), vals.join(","));
            }
            Format::Json => {
                let mut map = serde_json::Map::new();
                for (k, v) in &self.fields {
                    let json = match v {
                        Value::Num(x) => serde_json::json!(round12(*x)),
                        other => serde_json::to_value(other).expect("plain value"),
                    };
                    map.insert((*k).to_string(), json);
                }
                out = serde_json::to_string(&serde_json::Value::Object(map)).expect("serializable");
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(2.0197410588515208), "2.01974105885");
        assert_eq!(fmt12(2.0), "2");
        assert_eq!(fmt12(-0.5), "-0.5");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(123456.789), "123456.789");
        assert_eq!(fmt12(1.5e-9), "1.5e-9");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(round12(0.1 + 0.2), 0.3);
    }

    #[test]
    fn json_keeps_field_order() {
        let mut r = Report::default();
        r.push("value", 1.25).push("bound", 2.0).push("violated", false);
        assert_eq!(r.render(Format::Json), "{\"value\":1.25,\"bound\":2.0,\"violated\":false}\n");
        assert_eq!(r.render(Format::Csv), "value,bound,violated\n1.25,2,false\n");
        assert_eq!(r.render(Format::Text), "value=1.25\nbound=2\nviolated=false\n");
    }
}
