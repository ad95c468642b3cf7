use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// A table with named columns. Rendering is byte-for-byte deterministic: the
/// optional `#` line holds compact JSON and numbers use the shortest
/// round-trip form.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Option<serde_json::Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { header: None, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(mut self, header: &impl Serialize) -> Self {
        self.header = Some(serde_json::to_value(header).expect("header serializes"));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(h) = &self.header {
            out.push_str("# ");
            out.push_str(&h.to_string());
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses a table written by [`Table::render`] or any plain CSV of numbers
    /// with one header line. Every `#` line before the header is read as JSON
    /// and the last one kept.
    pub fn parse(text: &str) -> Result<Table> {
        let mut header = None;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let columns = loop {
            let Some((_, line)) = lines.next() else {
                return Err(Error::validation("csv", "no column header line"));
            };
            match line.strip_prefix('#') {
                Some(json) => header = serde_json::from_str(json.trim()).ok(),
                None => break line.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>(),
            }
        };
        let mut rows = Vec::new();
        for (i, line) in lines {
            let row = line
                .split(',')
                .map(|c| parse_number(c.trim()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::validation(format!("csv line {}", i + 1), "non-numeric cell"))?;
            if row.len() != columns.len() {
                return Err(Error::validation(
                    format!("csv line {}", i + 1),
                    format!("{} cells for {} columns", row.len(), columns.len()),
                ));
            }
            rows.push(row);
        }
        Ok(Table { header, columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if v == 0.0 || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::validation("output", "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip_is_exact() {
        let mut t = Table::new(&["t", "survival"]).with_header(&serde_json::json!({"seed": 7}));
        t.push(vec![0.1, 1.0 / 3.0]);
        t.push(vec![1e-300, f64::INFINITY]);
        let text = t.render();
        assert!(text.starts_with("# {\"seed\":7}\nt,survival\n"));
        let back = Table::parse(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(Table::parse("a,b\n1,2\n3\n").is_err());
        assert!(Table::parse("# only a comment\n").is_err());
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("x.csv");
        write_atomic(&path, b"a\n1\n").unwrap();
        write_atomic(&path, b"a\n2\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a\n2\n");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
