//! Tolerant comparison of regenerated artifacts against committed ones.

use serde_json::Value;

/// Parse a rendered amplitude table back into `(μ, y₊, ᾱ)` rows.
pub fn parse_table(text: &str) -> Result<Vec<[f64; 3]>, String> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cells: Vec<f64> = l
                .split_whitespace()
                .map(|c| c.parse::<f64>().map_err(|e| format!("bad cell `{c}`: {e}")))
                .collect::<Result<_, _>>()?;
            <[f64; 3]>::try_from(cells).map_err(|c| format!("expected 3 columns, got {}", c.len()))
        })
        .collect()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

/// Differences between two JSON trees. Numbers agree when within `rel`
/// relative (or `1e-12` absolute) error; everything else must match exactly.
pub fn diff_json(got: &Value, want: &Value, rel: f64) -> Vec<String> {
    let mut out = Vec::new();
    walk(got, want, rel, "$", &mut out);
    out
}

fn walk(got: &Value, want: &Value, rel: f64, path: &str, out: &mut Vec<String>) {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (
                a.as_f64().unwrap_or(f64::NAN),
                b.as_f64().unwrap_or(f64::NAN),
            );
            if !((a - b).abs() <= 1e-12 || rel_err(a, b) <= rel) {
                out.push(format!("{path}: {a} vs {b}"));
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                out.push(format!("{path}: length {} vs {}", a.len(), b.len()));
                return;
            }
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                walk(x, y, rel, &format!("{path}[{i}]"), out);
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            for key in a.keys().chain(b.keys().filter(|k| !a.contains_key(*k))) {
                match (a.get(key), b.get(key)) {
                    (Some(x), Some(y)) => walk(x, y, rel, &format!("{path}.{key}"), out),
                    _ => out.push(format!("{path}.{key}: present on one side only")),
                }
            }
        }
        (a, b) if a == b => {}
        (a, b) => out.push(format!("{path}: {a} vs {b}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_tolerance() {
        let a = json!({"x": [1.0, 2.0], "s": "stable", "n": null});
        let b = json!({"x": [1.0, 2.0 + 1e-9], "s": "stable", "n": null});
        assert!(diff_json(&a, &b, 1e-6).is_empty());
        let c = json!({"x": [1.0, 2.1], "s": "unstable"});
        let d = diff_json(&a, &c, 1e-6);
        assert_eq!(d.len(), 3, "{d:?}");
        assert!(!diff_json(&json!([1]), &json!([1, 2]), 1e-6).is_empty());
    }

    #[test]
    fn table_round_trip() {
        let t = "  mu  y  a\n  0.1  2.0  2.00\n\n  1  3  4\n";
        assert_eq!(
            parse_table(t).unwrap(),
            vec![[0.1, 2.0, 2.0], [1.0, 3.0, 4.0]]
        );
        assert!(parse_table("h\n1 2\n").is_err());
    }
}
