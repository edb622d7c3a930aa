//! CSV and JSON writers. Numbers are printed in their shortest round-trip
//! form so identical inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::Failure;

pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).map_err(|e| Failure::Io(format!("{}: {e}", root.display())))?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes a CSV of pre-formatted cells.
    pub fn write_table<I>(&self, name: &str, header: &[&str], rows: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.path(name);
        let io = |e: csv::Error| Failure::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.write_record(&r).map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }

    /// Writes a CSV of numbers.
    pub fn write_csv<I>(&self, name: &str, header: &[&str], rows: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        self.write_table(name, header, rows.into_iter().map(|r| r.into_iter().map(fmt_f64).collect()))
    }

    pub fn write_json(&self, name: &str, value: &serde_json::Value) -> Result<(), Failure> {
        let path = self.path(name);
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
        s.push('\n');
        fs::write(&path, s).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.0, -0.5, 11.0 / 18.0, 1e-9, 3.2e20, 0.121588, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(2.5e-7), "2.5e-7");
        assert_eq!(fmt_f64(0.25), "0.25");
    }
}
