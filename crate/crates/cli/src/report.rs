//! Canonical JSON: sorted keys, two-space indent, floats with 17 significant digits.

use std::fmt::Write;

use serde_json::{Map, Value};

pub fn to_canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
            }
            out.push('\n');
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => write_object(out, map, indent),
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, indent: usize) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push('{');
    for (i, k) in keys.into_iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        pad(out, indent + 1);
        out.push_str(&Value::String(k.clone()).to_string());
        out.push_str(": ");
        write_value(out, &map[k], indent + 1);
    }
    out.push('\n');
    pad(out, indent);
    out.push('}');
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// `{:.16e}` gives 17 significant digits; JSON accepts the exponent form.
pub fn float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    let mut s = String::new();
    write!(s, "{x:.16e}").expect("write to string");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits_and_keys_are_sorted() {
        let v = json!({"b": 0.1, "a": [1, 2.5], "c": {}});
        let s = to_canonical(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [\n    1,\n    2.5000000000000000e0\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {}\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"], json!(0.1));
    }
}
