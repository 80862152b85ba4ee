//! JSON-lines persistence of failed bound reports.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::stripe::StripeProblem;
use crate::type_space::TypeDistribution;

use super::checks::BoundReport;

#[derive(Serialize)]
struct Counterexample<'a> {
    report: &'a BoundReport,
    problem: &'a StripeProblem,
    distributions: Vec<(&'a str, &'a TypeDistribution)>,
    grid: &'a [Vec<f64>],
}

/// Appends one JSON line per violated report.
#[derive(Debug, Clone)]
pub struct CounterexampleLog {
    path: PathBuf,
}

impl CounterexampleLog {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        CounterexampleLog { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes a record when `report.holds` is false; returns whether it did.
    pub fn record(
        &self,
        report: &BoundReport,
        problem: &StripeProblem,
        distributions: &[(&str, &TypeDistribution)],
        grid: &[Vec<f64>],
    ) -> Result<bool> {
        if report.holds {
            return Ok(false);
        }
        let line = serde_json::to_string(&Counterexample {
            report,
            problem,
            distributions: distributions.to_vec(),
            grid,
        })?;
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(file, "{line}")?;
        Ok(true)
    }

    /// Records in the log; a missing file counts as none.
    pub fn count(&self) -> Result<usize> {
        if !self.path.exists() {
            return Ok(0);
        }
        let mut n = 0;
        for line in BufReader::new(File::open(&self.path)?).lines() {
            if !line?.trim().is_empty() {
                n += 1;
            }
        }
        Ok(n)
    }
}
