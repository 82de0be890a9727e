//! Report rendering. Every command builds a serializable report; `--json`
//! prints it as is and text mode walks the same JSON value, so both modes
//! show identical numbers.

use serde::Serialize;
use serde_json::Value;

/// Key whose contents (matrices) are emitted only in JSON mode.
pub const MATRICES_KEY: &str = "matrices";

/// A number formatted exactly as it appears in JSON output.
pub fn fmt_num(x: f64) -> String {
    Value::from(x).to_string()
}

pub fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialize to JSON")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn render_into(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                if k == MATRICES_KEY {
                    continue;
                }
                match item {
                    Value::Array(xs) if xs.iter().all(|x| scalar(x).is_some()) => {
                        let parts: Vec<String> = xs.iter().filter_map(scalar).collect();
                        out.push_str(&format!("{pad}{k}: [{}]\n", parts.join(", ")));
                    }
                    _ => match scalar(item) {
                        Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                        None => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            render_into(item, indent + 1, out);
                        }
                    },
                }
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        render_into(x, indent + 1, out);
                    }
                }
            }
        }
        other => {
            if let Some(s) = scalar(other) {
                out.push_str(&format!("{pad}{s}\n"));
            }
        }
    }
}

/// Indented `key: value` text for a report value.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_uses_json_number_formatting() {
        let v = json!({ "residual": 1.25e-16, "dim": 4, "matrices": { "basis": [[1.0]] } });
        let text = render_text(&v);
        assert!(text.contains("residual: 1.25e-16"));
        assert!(text.contains("dim: 4"));
        assert!(!text.contains("basis"));
        assert_eq!(fmt_num(1.25e-16), "1.25e-16");
    }

    #[test]
    fn nested_values_are_indented() {
        let v = json!({ "conditions": [{ "name": "c1", "holds": true }], "blocks": [1, 2] });
        let text = render_text(&v);
        assert!(text.contains("conditions:\n  [0]\n    name: c1\n    holds: true\n"));
        assert!(text.contains("blocks: [1, 2]"));
    }
}
