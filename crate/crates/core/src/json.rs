//! Deterministic JSON rendering.
//!
//! Floats are printed with 17 significant digits in scientific notation so
//! that output is byte-stable and round-trips exactly; integers print as
//! integers and non-finite floats as `null`. Object keys keep struct
//! declaration order.

use serde::Serialize;
use serde_json::Value;

/// `x` with 17 significant digits, e.g. `2.5000000000000000e-1`.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let tree = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&tree, 0, &mut out);
    out.push('\n');
    Ok(out)
}

/// Serializes an `i128` as a JSON integer when it fits in 64 bits, otherwise
/// as the nearest double.
pub fn wide_int<S: serde::Serializer>(v: &i128, ser: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(*v) {
        Ok(x) => ser.serialize_i64(x),
        Err(_) => ser.serialize_f64(*v as f64),
    }
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                match n.as_f64() {
                    Some(f) if f.is_finite() => out.push_str(&fmt_sig17(f)),
                    _ => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Arrays of scalars stay on one line.
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, depth + 1, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(depth + 1, out);
                write_value(item, depth + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                indent(depth + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, depth + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(depth, out);
            out.push('}');
        }
    }
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        zeta: f64,
        alpha: u64,
        name: &'static str,
        missing: f64,
        list: Vec<f64>,
    }

    #[test]
    fn stable_layout() {
        let row = Row {
            zeta: 0.25,
            alpha: 3,
            name: "a\"b",
            missing: f64::INFINITY,
            list: vec![1.0, 0.1],
        };
        let s = to_json_string(&row).unwrap();
        let expected = "{\n  \"zeta\": 2.5000000000000000e-1,\n  \"alpha\": 3,\n  \"name\": \"a\\\"b\",\n  \"missing\": null,\n  \"list\": [1.0000000000000000e0, 1.0000000000000001e-1]\n}\n";
        assert_eq!(s, expected);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["list"][1].as_f64(), Some(0.1));
    }

    #[test]
    fn sig17_round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, 5e-324, 0.999_999_999_999_999_9] {
            assert_eq!(fmt_sig17(x).parse::<f64>().unwrap(), x);
        }
    }
}
