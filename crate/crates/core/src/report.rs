//! Deterministic artifact output: JSON, CSV, and fixed-column tables.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Serde adapter writing infinities as the strings `"inf"` / `"-inf"`,
/// since JSON has no literal for them. Finite values stay numbers.
pub mod f64_or_inf {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() || !s.is_human_readable() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct V;

    impl<'de> Visitor<'de> for V {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or \"inf\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(E::custom),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(V)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// CSV text from a header and numeric rows, using shortest round-trip
/// formatting for every value.
pub fn numeric_csv<'a, I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Write via a sibling temporary file and rename, so readers never observe
/// a partial artifact.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `x` with 10 significant digits in positional notation.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.9}");
    }
    // Round in scientific form first so a carry (9.99… -> 10.0) moves the exponent.
    let sci = format!("{x:.9e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (9 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One row of the amplitude table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub mu: f64,
    pub y_plus0: f64,
    pub alpha_bar: f64,
}

const COLUMN_WIDTH: usize = 18;

/// Fixed-column plain-text table sorted by μ, 10 significant digits.
pub fn render_table(rows: &[TableRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Config("cannot render an empty table".into()));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>w$}{:>w$}{:>w$}",
        "mu",
        "y_plus0",
        "alpha_bar",
        w = COLUMN_WIDTH
    );
    for r in &sorted {
        let _ = writeln!(
            out,
            "{:>w$}{:>w$}{:>w$}",
            sig10(r.mu),
            sig10(r.y_plus0),
            sig10(r.alpha_bar),
            w = COLUMN_WIDTH
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig10_formats() {
        assert_eq!(sig10(2.0000586437166383), "2.000058644");
        assert_eq!(sig10(0.1), "0.1000000000");
        assert_eq!(sig10(10.0), "10.00000000");
        assert_eq!(sig10(7.5528123), "7.552812300");
        assert_eq!(sig10(9.99999999999), "10.00000000");
        assert_eq!(sig10(-0.0123), "-0.01230000000");
    }

    #[test]
    fn table_single_row_and_errors() {
        let t = render_table(&[TableRow {
            mu: 0.1,
            y_plus0: 2.00117,
            alpha_bar: 2.0000586437,
        }])
        .unwrap();
        assert_eq!(t.lines().count(), 2);
        assert!(t.lines().nth(1).unwrap().contains("2.000058644"));
        assert!(render_table(&[]).is_err());
    }

    #[test]
    fn table_sorts_by_mu() {
        let rows = [
            TableRow {
                mu: 2.0,
                y_plus0: 1.0,
                alpha_bar: 1.0,
            },
            TableRow {
                mu: 1.0,
                y_plus0: 1.0,
                alpha_bar: 1.0,
            },
        ];
        let t = render_table(&rows).unwrap();
        let first = t.lines().nth(1).unwrap();
        assert!(first.trim_start().starts_with("1.000000000"));
    }

    #[test]
    fn infinity_round_trips_through_json() {
        #[derive(Serialize, serde::Deserialize)]
        struct W {
            #[serde(with = "f64_or_inf")]
            d: f64,
        }
        let s = serde_json::to_string(&W { d: f64::INFINITY }).unwrap();
        assert_eq!(s, r#"{"d":"inf"}"#);
        let w: W = serde_json::from_str(&s).unwrap();
        assert!(w.d.is_infinite());
        let w: W = serde_json::from_str(r#"{"d":3}"#).unwrap();
        assert_eq!(w.d, 3.0);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("lienard-report-{}", std::process::id()));
        let p = dir.join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        fs::remove_dir_all(&dir).unwrap();
    }
}
