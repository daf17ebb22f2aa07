//! CSV and JSON output.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::study::ConvergenceRecord;
use super::HarnessError;

pub const CSV_HEADER: &str = "method,N,M,metric,s_or_point,error,cond,seed,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// JSON document: tool version, config echo and records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutput {
    pub version: String,
    pub config: ExperimentConfig,
    pub records: Vec<ConvergenceRecord>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip representation; `NaN` for failed cases.
fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

pub fn to_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&r.method),
            r.n,
            r.m,
            csv_field(&r.metric),
            csv_field(&r.s_or_point),
            number(r.error),
            number(r.cond),
            seed,
            r.wall_ms
        );
    }
    out
}

pub fn to_json(config: &ExperimentConfig, records: &[ConvergenceRecord]) -> Result<String, HarnessError> {
    let doc = StudyOutput { version: crate::VERSION.to_string(), config: config.clone(), records: records.to_vec() };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| HarnessError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_json(text: &str) -> Result<StudyOutput, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn emit(
    path: &Path,
    format: Format,
    config: &ExperimentConfig,
    records: &[ConvergenceRecord],
) -> Result<(), HarnessError> {
    let text = match format {
        Format::Csv => to_csv(records),
        Format::Json => to_json(config, records)?,
    };
    std::fs::write(path, text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(error: f64, seed: Option<u64>) -> ConvergenceRecord {
        ConvergenceRecord {
            method: "least_squares".into(),
            n: 8,
            m: 64,
            metric: "field_point".into(),
            s_or_point: "2;0".into(),
            error,
            cond: 12.5,
            seed,
            wall_ms: 0,
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_rows() {
        let csv = to_csv(&[record(1.5e-3, None), record(f64::NAN, Some(4))]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "least_squares,8,64,field_point,2;0,1.5e-3,1.25e1,,0");
        assert_eq!(lines[2], "least_squares,8,64,field_point,2;0,NaN,1.25e1,4,0");
        // shortest representation round-trips
        let x = 0.1 + 0.2;
        assert_eq!(number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
