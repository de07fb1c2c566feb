use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::analysis::{CriteriaReport, FitResult, SweepRecord};
use crate::error::{invalid, Error, Result};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 16] = [
    "phi",
    "theta",
    "lambda",
    "observable",
    "theory",
    "qnd_estimate",
    "tomo_in",
    "tomo_out",
    "tomo_post",
    "fidelity_in",
    "fidelity_out",
    "fidelity_post",
    "branch",
    "branch_reliable",
    "shots",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn render_csv(records: &[SweepRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(invalid("no records to emit"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// JSON document: the config echo, records, fits and optional criteria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub config: SweepConfig,
    pub shots_apply_to: String,
    pub records: Vec<SweepRecord>,
    pub fits: Vec<FitResult>,
    pub criteria: Option<CriteriaReport>,
}

impl JsonReport {
    pub fn new(config: &SweepConfig, records: Vec<SweepRecord>, fits: Vec<FitResult>) -> Self {
        Self {
            config: config.clone(),
            shots_apply_to: "ancilla readout and each of the 16 tomography settings".into(),
            records,
            fits,
            criteria: None,
        }
    }
}

pub fn render_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}
