//! Machine-readable reports: every numeric result carries an exactness
//! tag, JSON output is deterministic (sorted keys, no timestamps), and
//! the CSV rendering is a flat view of the same numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

/// A report for one command invocation. Wall-clock timings are kept out
/// of the serialized form so that reruns with the same inputs and seed
/// produce byte-identical output; they are printed to stderr instead.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            results: Value::Null,
            warnings: Vec::new(),
            timings: Vec::new(),
        }
    }
}

/// Tag an exact rational result.
pub fn exact_rational(r: &BigRational) -> Value {
    json!({
        "kind": "exact-rational",
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
    })
}

/// Tag an exact integer result (a rational with denominator one).
pub fn exact_int<T: Into<BigInt>>(v: T) -> Value {
    json!({
        "kind": "exact-rational",
        "num": v.into().to_string(),
        "den": "1",
    })
}

/// Tag a floating-point result without a known error bar.
pub fn float(v: f64) -> Value {
    json!({ "kind": "float-with-error", "value": v })
}

/// Tag a floating-point result with its error estimate.
pub fn float_with_error(v: f64, error: f64) -> Value {
    json!({ "kind": "float-with-error", "value": v, "error": error })
}

/// Render as deterministic pretty JSON.
pub fn render_json(report: &Report) -> String {
    let mut text =
        serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    text.push('\n');
    text
}

/// Render as CSV: one `path,value` row per leaf of the results tree,
/// with tagged numerics collapsed to their value.
pub fn render_csv(report: &Report) -> String {
    let mut rows = vec![format!("key,value\ncommand,{}", report.command)];
    flatten("results", &report.results, &mut rows);
    for w in &report.warnings {
        rows.push(format!("warning,{}", csv_escape(w)));
    }
    rows.join("\n") + "\n"
}

fn flatten(path: &str, value: &Value, rows: &mut Vec<String>) {
    if let Some(scalar) = tagged_scalar(value) {
        rows.push(format!("{path},{scalar}"));
        return;
    }
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{path}.{k}"), v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), v, rows);
            }
        }
        Value::Null => rows.push(format!("{path},")),
        Value::String(s) => rows.push(format!("{path},{}", csv_escape(s))),
        other => rows.push(format!("{path},{other}")),
    }
}

/// Collapse a tagged numeric object to its printable value.
fn tagged_scalar(value: &Value) -> Option<String> {
    let map: &Map<String, Value> = value.as_object()?;
    match map.get("kind")?.as_str()? {
        "exact-rational" => {
            let num = map.get("num")?.as_str()?;
            let den = map.get("den")?.as_str()?;
            Some(if den == "1" { num.to_string() } else { format!("{num}/{den}") })
        }
        "float-with-error" => Some(map.get("value")?.to_string()),
        _ => None,
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
