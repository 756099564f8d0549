//! Versioned claim reports and their JSON / TSV emission.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Recorded measurement without an expected outcome.
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub construction: String,
    pub claim: String,
    pub statement: String,
    pub verdict: Verdict,
    pub measured: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(seed: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            seed,
            entries: Vec::new(),
        }
    }

    /// No entry failed.
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Tsv,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "tsv" => Ok(Format::Tsv),
            other => Err(HarnessError::UnknownFormat(other.to_string())),
        }
    }
}

const TSV_COLUMNS: [&str; 5] = ["construction", "claim", "verdict", "measured", "statement"];

fn tsv_field(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}

/// Deterministic text form of a report. TSV starts with a `#` metadata line
/// and a header, then one row per entry.
pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Tsv => {
            let mut out = format!(
                "# format_version={}\ttool_version={}\tseed={}\n{}\n",
                report.format_version,
                report.tool_version,
                report.seed,
                TSV_COLUMNS.join("\t")
            );
            for e in &report.entries {
                let row = [
                    tsv_field(&e.construction),
                    tsv_field(&e.claim),
                    e.verdict.to_string(),
                    tsv_field(&e.measured),
                    tsv_field(&e.statement),
                ];
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
            out
        }
    }
}

pub fn parse_json(text: &str) -> Result<Report, HarnessError> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(7);
        r.entries.push(Entry {
            construction: "c".into(),
            claim: "x".into(),
            statement: "tab\there".into(),
            verdict: Verdict::Pass,
            measured: "1".into(),
        });
        r
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new(0);
        assert_eq!(parse_json(&emit(&r, Format::Json)).unwrap(), r);
        assert_eq!(emit(&r, Format::Tsv).lines().count(), 2);
    }

    #[test]
    fn json_round_trip_and_tsv_rows() {
        let r = sample();
        assert_eq!(parse_json(&emit(&r, Format::Json)).unwrap(), r);
        let tsv = emit(&r, Format::Tsv);
        assert_eq!(tsv.lines().count(), 3);
        assert!(tsv.lines().nth(2).unwrap().ends_with("tab\\there"));
        assert_eq!(emit(&r, Format::Json), emit(&r.clone(), Format::Json));
    }

    #[test]
    fn format_names() {
        assert_eq!("tsv".parse::<Format>().unwrap(), Format::Tsv);
        assert!("xml".parse::<Format>().is_err());
    }
}
