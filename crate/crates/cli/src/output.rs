//! Deterministic output formatting: C-style %.12e floats, CSV with a
//! manifest comment header, JSON with sorted keys and string-encoded floats.

use serde_json::Value;

/// C-style `%.12e`: sign, one leading digit, 12 fractional digits, and a
/// signed two-digit (minimum) exponent. Fixed-width floats keep diffs of
/// repeated runs meaningful.
pub fn fmt_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.12e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent in {:e} output");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

pub fn sci(x: f64) -> Value {
    Value::String(fmt_sci(x))
}

/// CSV document whose first line carries the manifest hash.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(manifest_hash: &str, columns: &str) -> Self {
        Self {
            lines: vec![format!("# manifest {manifest_hash}"), columns.to_string()],
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn finish(self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

/// Writes to the path when given, otherwise to stdout.
pub fn emit(out: Option<&std::path::Path>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(content.as_bytes())
        }
    }
}
