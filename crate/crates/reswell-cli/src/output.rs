use std::io::{self, Write};
use std::path::Path;

use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::{json, Map, Value};

use crate::CliError;

/// C-style %.12e: 13 significant digits, signed two-digit exponent.
pub fn fmt_e(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.12e}");
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

/// JSON number, or null when not finite.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn complex(z: num_complex::Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

struct Fixed;

impl Formatter for Fixed {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_e(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn write_null<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        CompactFormatter.write_null(w)
    }
}

/// `{"data": ..., "meta": {...}}` with sorted keys and a trailing newline.
pub fn render_json(meta: Map<String, Value>, data: Value) -> String {
    let doc = json!({ "meta": Value::Object(meta), "data": data });
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed);
    serde::Serialize::serialize(&doc, &mut ser).expect("in-memory JSON");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn render_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| fmt_e(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(fmt_e(12.34), "1.234000000000e+01");
        assert_eq!(fmt_e(-0.00012), "-1.200000000000e-04");
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(1e300), "1.000000000000e+300");
    }

    #[test]
    fn non_finite_becomes_null() {
        let s = render_json(Map::new(), json!([num(f64::NAN), num(1.0)]));
        assert_eq!(s, "{\"data\":[null,1.000000000000e+00],\"meta\":{}}\n");
    }

    #[test]
    fn csv_lines() {
        let s = render_csv(&["E", "x"], &[vec![1.0, 2.0]]);
        assert_eq!(s, "E,x\n1.000000000000e+00,2.000000000000e+00\n");
    }
}
