//! Deterministic serialization: JSON with fixed `{:.12e}` float formatting,
//! flat key,value CSV, and a plain-text pretty mode.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

/// JSON formatter that renders every float as `{:.12e}` so output bytes are
/// stable across runs and platforms.
pub struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.12e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.12e}")
    }
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn fmt_float(value: f64) -> String {
    format!("{value:.12e}")
}

/// Flattens a JSON tree into `key,value` CSV rows with dotted paths and
/// bracketed indices, floats in `{:.12e}`.
pub fn to_flat_csv(value: &impl Serialize) -> String {
    let tree: serde_json::Value =
        serde_json::to_value(value).expect("report types serialize infallibly");
    let mut rows = vec!["key,value".to_string()];
    flatten("", &tree, &mut rows);
    rows.join("\n") + "\n"
}

fn flatten(path: &str, value: &serde_json::Value, rows: &mut Vec<String>) {
    match value {
        serde_json::Value::Object(map) => {
            for (key, child) in map {
                let next = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                flatten(&next, child, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (idx, child) in items.iter().enumerate() {
                flatten(&format!("{path}[{idx}]"), child, rows);
            }
        }
        serde_json::Value::Number(n) => {
            let rendered = if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                fmt_float(n.as_f64().unwrap_or(f64::NAN))
            };
            rows.push(format!("{path},{rendered}"));
        }
        serde_json::Value::Bool(b) => rows.push(format!("{path},{b}")),
        serde_json::Value::String(s) => rows.push(format!("{path},{}", s.replace(',', ";"))),
        serde_json::Value::Null => rows.push(format!("{path},")),
    }
}
