//! Deterministic JSON and CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Rounds `x` to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_i64() || n.is_u64()) => serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with sorted keys and 12-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = round_value(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// CSV field: 12 significant digits, exponent form outside `[1e-4, 1e15)`.
pub fn fmt(x: f64) -> String {
    let r = round12(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Writes `text` to `dir/name`, creating the directory.
pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(path)
}

/// The primary artifact: into `out/name` when an output directory is set,
/// otherwise to stdout.
pub fn emit(out: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            write_file(dir, name, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-2.0e-20 / 3.0), -6.66666666667e-21);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(fmt(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt(5.230584552351e-9), "5.23058455235e-9");
        assert_eq!(fmt(-3.0), "-3");
    }

    #[test]
    fn json_is_sorted_and_rounded() {
        #[derive(Serialize)]
        struct T {
            z: f64,
            a: usize,
            m: Vec<f64>,
        }
        let s = to_json(&T { z: 1.0 / 3.0, a: 7, m: vec![2.0 / 3.0] }).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"m\"").unwrap());
        assert!(s.contains("0.333333333333") && s.contains("0.666666666667") && s.contains("\"a\": 7"));
    }
}
