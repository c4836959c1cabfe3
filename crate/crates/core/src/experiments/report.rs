use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::scenario::Mode;
use super::stats::wilson;
use crate::error::{Error, Result};

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// One histogram cell with its Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeCount {
    pub outcome: String,
    pub count: u64,
    pub proportion: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// A point estimate with a 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub mode: Mode,
    pub seed: u64,
    pub replicates: u64,
    pub version: String,
    pub counts: Vec<OutcomeCount>,
    #[serde(default)]
    pub estimates: Vec<Estimate>,
    #[serde(default)]
    pub statistics: BTreeMap<String, f64>,
    /// Measured by the harness but never serialized, so reruns are
    /// byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PartialEq for Report {
    fn eq(&self, other: &Self) -> bool {
        self.scenario == other.scenario
            && self.mode == other.mode
            && self.seed == other.seed
            && self.replicates == other.replicates
            && self.version == other.version
            && self.counts == other.counts
            && self.estimates == other.estimates
            && self.statistics == other.statistics
    }
}

impl Report {
    pub fn new(scenario: &str, mode: Mode, seed: u64, replicates: u64) -> Self {
        Self {
            scenario: scenario.to_string(),
            mode,
            seed,
            replicates,
            version: crate::VERSION.to_string(),
            counts: Vec::new(),
            estimates: Vec::new(),
            statistics: BTreeMap::new(),
            wall_time: Duration::ZERO,
        }
    }

    /// Replaces the histogram; proportions are relative to `replicates`.
    pub fn set_counts<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let total = self.replicates;
        self.counts = cells
            .into_iter()
            .map(|(outcome, count)| {
                let (ci_low, ci_high) = wilson(count, total, CONFIDENCE);
                OutcomeCount {
                    outcome: outcome.into(),
                    count,
                    proportion: if total == 0 {
                        0.0
                    } else {
                        count as f64 / total as f64
                    },
                    ci_low,
                    ci_high,
                }
            })
            .collect();
    }

    pub fn count(&self, outcome: &str) -> Option<&OutcomeCount> {
        self.counts.iter().find(|c| c.outcome == outcome)
    }

    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics.get(name).copied()
    }

    pub(crate) fn stat(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.statistics.insert(name.to_string(), value);
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Writes the report. CSV carries the histogram with the stable header
/// `outcome,count,proportion,ci_low,ci_high`; JSON carries everything.
pub fn write_report<W: Write>(rep: &Report, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Json => {
            let text = rep.to_json()?;
            out.write_all(text.as_bytes()).map_err(|source| Error::Io {
                path: "<output>".into(),
                source,
            })
        }
        Format::Csv => write_rows(
            &rep.counts,
            &["outcome", "count", "proportion", "ci_low", "ci_high"],
            out,
        ),
    }
}

/// Writes the report to `path`, reporting failures with the path.
pub fn emit_report(rep: &Report, format: Format, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_report(rep, format, &mut buf)?;
    std::fs::write(path, buf).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Serialises records as CSV. The header is written even when there are no
/// records.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], header: &[&str], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}

/// Serialises records as a pretty JSON array.
pub fn write_rows_json<T: Serialize, W: Write>(rows: &[T], mut out: W) -> Result<()> {
    let text = serde_json::to_string_pretty(rows)? + "\n";
    out.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}
