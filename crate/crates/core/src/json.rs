//! Canonical JSON: keys sorted, two-space indentation, integers verbatim and
//! every float written with 17 significant digits (`{:.16e}`), so equal
//! values always produce identical bytes and floats round-trip exactly.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Serialize `v` canonically, with a trailing newline.
pub fn to_canonical<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v).map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    Ok(value_to_canonical(&value))
}

/// Canonical form of an already built value.
pub fn value_to_canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

/// Canonical float text.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short scalar arrays stay on one line.
            if a.len() <= 4 && a.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, level);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, x, level + 1);
                if i + 1 < a.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&serde_json::to_string(k).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, &m[*k], level + 1);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_fixed_floats() {
        let s = value_to_canonical(&json!({"b": 1, "a": [0.1, 2.0], "c": {"z": null, "y": "q"}}));
        assert_eq!(
            s,
            "{\n  \"a\": [1.0000000000000001e-1, 2.0000000000000000e0],\n  \"b\": 1,\n  \"c\": {\n    \"y\": \"q\",\n    \"z\": null\n  }\n}\n"
        );
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5, f64::MIN_POSITIVE] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back, x);
            let v: Value = serde_json::from_str(&fmt_f64(x)).unwrap();
            assert_eq!(v.as_f64().unwrap(), x);
        }
    }
}
