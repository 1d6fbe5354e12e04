//! Deterministic text output: every float carries 17 significant digits.

use std::fmt::Write as _;

use ist_core::C64;
use serde_json::{Map, Value};

/// `d.dddddddddddddddde±x`, exact for every finite double; non-finite values
/// are spelled `nan`, `inf`, `-inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

/// JSON has no non-finite numbers; those become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => write!(out, "{i}").unwrap(),
            (_, Some(u), _) => write!(out, "{u}").unwrap(),
            (_, _, Some(f)) => out.push_str(&fmt17(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, x) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    write_value(out, x, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
        }
        Value::Object(map) => write_object(out, map, indent),
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, indent: usize) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for (i, (k, x)) in map.iter().enumerate() {
        pad(out, indent + 1);
        out.push_str(&serde_json::to_string(k).unwrap());
        out.push_str(": ");
        write_value(out, x, indent + 1);
        out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
    }
    pad(out, indent);
    out.push('}');
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [2.0 / 3.0, 1e-300, -5.2203194605836, 0.1, 123456789.0] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
        assert_eq!(fmt17(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn json_is_parseable_and_exact() {
        let v = json!({"a": 2.0 / 3.0, "b": [1, 2.5], "c": {"d": null, "e": "x"}, "f": [{"g": true}]});
        let s = to_json_string(&v);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(s.contains("6.6666666666666663e-1"));
        assert!(s.ends_with("}\n"));
    }
}
