use std::path::Path;

use anyhow::{Context, Result};
use isocap::fmt::{format_sig, to_json_string};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, Output};

pub fn write(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = to_json_string(value)?;
    s.push('\n');
    Ok(s)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => format_sig(f, 12),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => String::new(),
    }
}

/// CSV with one row per object, columns from the scalar fields of the first.
pub fn csv_rows(rows: &[Value]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&String> = match rows.first() {
        Some(Value::Object(map)) => map
            .iter()
            .filter(|(_, v)| !matches!(v, Value::Array(_) | Value::Object(_)))
            .map(|(k, _)| k)
            .collect(),
        _ => Vec::new(),
    };
    w.write_record(&header)?;
    for row in rows {
        w.write_record(header.iter().map(|k| cell(&row[k.as_str()])))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Emits one record in the requested format.
pub fn emit<T: Serialize>(value: &T, output: &Output, default: Format) -> Result<()> {
    let text = match output.format.unwrap_or(default) {
        Format::Json => json(value)?,
        Format::Csv => csv_rows(&[serde_json::to_value(value)?])?,
    };
    write(&text, output.out.as_deref())
}
