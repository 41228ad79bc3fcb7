//! Serialization of command results.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const SCHEMA: u32 = 1;

/// Unit system echoed in every output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
    pub length_scale: f64,
}

impl Units {
    pub fn of(config: &RunConfig) -> Self {
        Self {
            hbar: config.hbar,
            mass: config.mass,
            length_scale: config.length_scale,
        }
    }
}

/// Shortest round-trip spelling, with an exponent outside `[1e-4, 1e15)`.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Flattens a JSON document into `key,value` rows, with dotted keys and
/// array indices.
pub fn to_key_value_csv<T: Serialize>(value: &T) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, v)| walk(&join(k), v, out)),
            Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| walk(&join(&i.to_string()), v, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", &serde_json::to_value(value).expect("reports serialize"), &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in rows {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input")
}

/// Renders a report in the requested format.
pub fn render<T: Serialize>(value: &T, format: Format) -> String {
    match format {
        Format::Json => to_json(value),
        Format::Csv => to_key_value_csv(value),
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, -3.0, 0.25, 1.0400642989251089e18, 6.504993208983017e-8, 1e-4, 1e15] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(number(6.5e-8), "6.5e-8");
        assert_eq!(number(9.25), "9.25");
    }

    #[test]
    fn flattening() {
        let v = serde_json::json!({"a": {"b": [1.5, null]}, "c": "x,y"});
        assert_eq!(to_key_value_csv(&v), "key,value\na.b.0,1.5\na.b.1,\nc,\"x,y\"\n");
    }
}
