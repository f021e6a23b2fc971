//! Detection reports and their JSON / CSV encodings.
//!
//! JSON documents have three top-level keys, always in this order:
//! `config` (the parameters used), `frames` (one record per analysed frame,
//! sorted by `frame_index`) and, when block analysis ran, `blocks`.
//! Every floating-point value is written with exactly six fractional digits
//! so that identical inputs always yield identical bytes.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::numfmt::{self, fixed};
use crate::seba::BlockClass;

/// Outcome of the temporal criterion for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Ok,
    Distorted,
    InsufficientWindow,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::Distorted => "distorted",
            Verdict::InsufficientWindow => "insufficient-window",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_index: usize,
    #[serde(with = "numfmt::six")]
    pub score: f64,
    pub boundary_offset: usize,
    #[serde(with = "numfmt::six_opt", default)]
    pub mean: Option<f64>,
    #[serde(with = "numfmt::six_opt", default)]
    pub sigma: Option<f64>,
    /// Value of the detection ratio compared against beta squared.
    #[serde(with = "numfmt::six_opt", default)]
    pub ratio: Option<f64>,
    pub verdict: Verdict,
}

/// Spatial error block analysis result for one region of one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub frame_index: usize,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub class: BlockClass,
    pub high_bin: Option<u8>,
    pub orientation_degrees: Option<u32>,
    pub period_height: Option<usize>,
    pub period_width: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub config: AnalysisConfig,
    pub frames: Vec<FrameRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockSummary>>,
}

impl DetectionReport {
    pub fn new(config: AnalysisConfig) -> Self {
        Self {
            config,
            frames: Vec::new(),
            blocks: None,
        }
    }

    /// Checks ordering and uniqueness of frame records.
    pub fn validate(&self) -> Result<()> {
        for pair in self.frames.windows(2) {
            if pair[0].frame_index >= pair[1].frame_index {
                return Err(Error::Malformed(format!(
                    "frame records out of order at index {}",
                    pair[1].frame_index
                )));
            }
        }
        Ok(())
    }

    /// Indices of frames judged distorted.
    pub fn flagged(&self) -> Vec<usize> {
        self.frames
            .iter()
            .filter(|r| r.verdict == Verdict::Distorted)
            .map(|r| r.frame_index)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::UnsupportedFormat(format!("report format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "frame_index,score,boundary_offset,mean,sigma,ratio,verdict";

/// Renders `report` into a string in the requested encoding.
pub fn render_report(report: &DetectionReport, format: ReportFormat) -> Result<String> {
    report.validate()?;
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let opt = |v: Option<f64>| v.map(fixed).unwrap_or_default();
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in &report.frames {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.frame_index,
                    fixed(r.score),
                    r.boundary_offset,
                    opt(r.mean),
                    opt(r.sigma),
                    opt(r.ratio),
                    r.verdict.as_str()
                );
            }
            Ok(s)
        }
    }
}

pub const BLOCK_CSV_HEADER: &str =
    "frame_index,x,y,width,height,class,high_bin,orientation_degrees,period_height,period_width";

/// One CSV line per block summary; absent values are left empty.
pub fn render_blocks_csv(blocks: &[BlockSummary]) -> String {
    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|v| v.to_string()).unwrap_or_default()
    }
    let mut s = String::from(BLOCK_CSV_HEADER);
    s.push('\n');
    for b in blocks {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            b.frame_index,
            b.x,
            b.y,
            b.width,
            b.height,
            b.class.as_str(),
            opt(b.high_bin),
            opt(b.orientation_degrees),
            opt(b.period_height),
            opt(b.period_width)
        );
    }
    s
}

pub fn write_report<W: Write>(report: &DetectionReport, format: ReportFormat, out: &mut W) -> Result<()> {
    let text = render_report(report, format)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn parse_report_json(text: &str) -> Result<DetectionReport> {
    let report: DetectionReport = serde_json::from_str(text)?;
    report.validate()?;
    Ok(report)
}
