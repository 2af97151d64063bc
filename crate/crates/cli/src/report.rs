//! Output rendering: JSON, CSV rows and a flat human-readable listing.

use robustcover::Rational;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Columns of every CSV this tool writes.
pub const CSV_HEADER: [&str; 12] = [
    "instance", "problem", "p", "q", "lambda", "alg", "value", "exact", "ratio", "rho_on", "rho_off", "runtime_ms",
];

/// One CSV row. Rationals are `p/q` strings; unknown values are empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RatioRow {
    pub instance: String,
    pub problem: String,
    pub p: usize,
    pub q: usize,
    pub lambda: String,
    pub alg: String,
    pub value: String,
    pub exact: String,
    pub ratio: String,
    pub rho_on: String,
    pub rho_off: String,
    pub runtime_ms: String,
}

pub fn opt_string<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(rows: &[RatioRow]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Solver(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Solver(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

/// `key: value` per scalar leaf, dotted keys for nested objects; arrays are
/// printed inline, arrays of objects only counted.
pub fn to_human<T: Serialize>(value: &T) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            Value::Array(items) if items.iter().any(Value::is_object) => {
                out.push_str(&format!("{prefix}: {} entries\n", items.len()))
            }
            Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
            Value::Null => {}
            other => out.push_str(&format!("{prefix}: {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", &serde_json::to_value(value).expect("reports always serialize"), &mut out);
    out
}

/// `a / b`, or `None` when `b = 0` and `a > 0`; `0/0` counts as 1.
pub fn ratio(a: Rational, b: Rational) -> Option<Rational> {
    if b == Rational::from_integer(0) {
        (a == b).then(|| Rational::from_integer(1))
    } else {
        Some(a / b)
    }
}

pub mod rational_opt {
    use robustcover::Rational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, serializer: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(r) => serializer.serialize_str(&r.to_string()),
            None => serializer.serialize_none(),
        }
    }
}
