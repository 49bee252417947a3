//! Deterministic text rendering of results.

use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Shortest round-trip form; exponent notation for very small or large
/// magnitudes. Non-finite values become an empty cell.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if !v.is_finite() {
        String::new()
    } else if v != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// A JSON number, or `null` for non-finite values.
pub fn json_num(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

pub fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

pub fn pretty_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or standard output when `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_forms() {
        assert_eq!(num(1e6), "1000000");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(4.6e-14), "4.6e-14");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(2e20), "2e20");
        assert_eq!(num(f64::INFINITY), "");
        assert_eq!(json_num(f64::NAN), serde_json::Value::Null);
    }
}
