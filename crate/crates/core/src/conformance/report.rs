use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

/// The outcome of one conformance check.
///
/// `undecided` counts trials whose comparison hit the precision cap. They
/// are excluded from `observed` and from the statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub name: String,
    pub observed: BTreeMap<String, u64>,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub seed: u64,
    pub trials: u64,
    pub undecided: u64,
}

impl ConformanceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report fields are serializable")
    }
}

/// Writes one JSON object per line.
pub fn write_json_lines<W: Write>(mut out: W, reports: &[ConformanceReport]) -> io::Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_json())?;
    }
    Ok(())
}

/// Reads reports written by [`write_json_lines`]. Blank lines are skipped.
pub fn read_json_lines<R: BufRead>(input: R) -> io::Result<Vec<ConformanceReport>> {
    let mut reports = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        reports.push(
            serde_json::from_str(&line)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?,
        );
    }
    Ok(reports)
}
