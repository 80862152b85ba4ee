//! Result files: pretty JSON records, CSV tables with 12 significant
//! digits, and a timing log kept apart from the results.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;

/// Decimal rendering with 12 significant digits; scientific notation
/// outside `[1e-5, 1e15)`.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let e = v.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.11e}")
    }
}

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    /// Header plus rows of already formatted cells.
    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Appends a timing line to `run.log`.
    pub fn log(&self, command: &str, elapsed: Duration, status: &str) -> Result<()> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut f = OpenOptions::new().create(true).append(true).open(self.path("run.log"))?;
        writeln!(
            f,
            "unix_time={stamp} command={command} elapsed_ms={:.3} status={status}",
            elapsed.as_secs_f64() * 1e3
        )?;
        Ok(())
    }
}

/// `sig12` over a slice, joined with `;` for a single CSV cell.
pub fn vector_cell(v: &[f64]) -> String {
    v.iter().map(|x| sig12(*x)).collect::<Vec<_>>().join(";")
}
