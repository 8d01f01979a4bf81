//! Rendering of command results as pretty JSON or flattened CSV.

use serde_json::Value;
use symideal_core::rational;

/// `(path, leaf)` pairs in document order; paths join keys and indices with `.`.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&join(k), x, out)),
            Value::Array(xs) => xs.iter().enumerate().for_each(|(i, x)| walk(&join(&i.to_string()), x, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

/// Columns `key,exact,decimal`; `decimal` is filled for rational leaves.
pub fn to_csv(v: &Value, precision: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "exact", "decimal"]).expect("in-memory writer");
    for (k, leaf) in flatten(v) {
        let dec = rational::parse(&leaf).map(|q| rational::decimal(&q, precision)).unwrap_or_default();
        w.write_record([k.as_str(), leaf.as_str(), dec.as_str()]).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn to_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}
