//! CSV text building and the single end-of-run writer.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// Shortest round-trip decimal form; stable across runs and platforms.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// Comma-separated table with a header row and `\n` line endings.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv {
            text,
            columns: header.len(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.columns);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
        }
        self.text.push('\n');
    }

    pub fn n_rows(&self) -> usize {
        self.text.lines().count() - 1
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing to stdout")?;
            out.flush().context("writing to stdout")
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).context("serializing JSON")?;
    let _ = writeln!(s);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(&[num(1.5), num(-0.0)]);
        c.row(&["x", ""]);
        assert_eq!(c.n_rows(), 2);
        assert_eq!(c.into_string(), "a,b\n1.5,0\nx,\n");
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("out.csv");
        assert!(emit(Some(&bad), "x").is_err());
    }
}
