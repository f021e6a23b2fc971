//! Frame ingestion and report serialization.
//!
//! Three input flavours are supported: YUV4MPEG2 streams, headerless raw
//! planar YUV, and directories of grayscale PGM images. Only the luma plane
//! is ever retained.

mod raw;
pub mod report;
mod sequence;
mod y4m;

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::LumaFrame;

pub use self::raw::RawReader;
pub use self::report::{
    parse_report_json, render_blocks_csv, render_report, write_report, BlockSummary, DetectionReport, FrameRecord,
    ReportFormat, Verdict, BLOCK_CSV_HEADER, CSV_HEADER,
};
pub use self::sequence::ImageSequenceReader;
pub use self::y4m::Y4mReader;

/// Container format of a frame source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Y4m,
    RawYuv,
    ImageSequence,
}

impl FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "y4m" => Ok(SourceFormat::Y4m),
            "raw-yuv" | "yuv" | "raw" => Ok(SourceFormat::RawYuv),
            "image-sequence" | "pgm" => Ok(SourceFormat::ImageSequence),
            other => Err(Error::UnsupportedFormat(format!("format tag {other:?}"))),
        }
    }
}

impl fmt::Display for SourceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceFormat::Y4m => "y4m",
            SourceFormat::RawYuv => "raw-yuv",
            SourceFormat::ImageSequence => "image-sequence",
        })
    }
}

/// Planar sample layout of a raw YUV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PixelLayout {
    #[default]
    Yuv420,
    Yuv422,
    YOnly,
}

impl PixelLayout {
    /// Bytes per frame for a `width` x `height` picture.
    pub fn frame_stride(self, width: usize, height: usize) -> usize {
        let luma = width * height;
        let half_w = width.div_ceil(2);
        match self {
            PixelLayout::Yuv420 => luma + 2 * half_w * height.div_ceil(2),
            PixelLayout::Yuv422 => luma + 2 * half_w * height,
            PixelLayout::YOnly => luma,
        }
    }
}

impl FromStr for PixelLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "420" | "yuv420" | "i420" | "yuv420p" => Ok(PixelLayout::Yuv420),
            "422" | "yuv422" | "yuv422p" => Ok(PixelLayout::Yuv422),
            "y-only" | "y" | "gray" | "mono" => Ok(PixelLayout::YOnly),
            other => Err(Error::UnsupportedFormat(format!("pixel layout {other:?}"))),
        }
    }
}

impl fmt::Display for PixelLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PixelLayout::Yuv420 => "420",
            PixelLayout::Yuv422 => "422",
            PixelLayout::YOnly => "y-only",
        })
    }
}

/// Where to read frames from and how to interpret them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpec {
    pub path: PathBuf,
    pub format: SourceFormat,
    /// `(width, height)`; required for raw YUV and rejected otherwise.
    pub geometry: Option<(usize, usize)>,
    pub layout: PixelLayout,
}

impl SourceSpec {
    pub fn y4m(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            format: SourceFormat::Y4m,
            geometry: None,
            layout: PixelLayout::default(),
        }
    }

    pub fn raw(path: impl Into<PathBuf>, width: usize, height: usize, layout: PixelLayout) -> Self {
        Self {
            path: path.into(),
            format: SourceFormat::RawYuv,
            geometry: Some((width, height)),
            layout,
        }
    }

    pub fn image_sequence(dir: impl Into<PathBuf>) -> Self {
        Self {
            path: dir.into(),
            format: SourceFormat::ImageSequence,
            geometry: None,
            layout: PixelLayout::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.format, self.geometry) {
            (SourceFormat::RawYuv, None) => Err(Error::param("raw-yuv input requires a width and height")),
            (SourceFormat::RawYuv, Some(_)) => Ok(()),
            (fmt, Some(_)) => Err(Error::param(format!("{fmt} input carries its own geometry"))),
            (_, None) => Ok(()),
        }
    }
}

/// Ordered stream of luma frames from any supported source.
pub enum FrameReader {
    Y4m(Y4mReader<BufReader<File>>),
    Raw(RawReader<BufReader<File>>),
    Sequence(ImageSequenceReader),
}

impl FrameReader {
    pub fn open(spec: &SourceSpec) -> Result<Self> {
        spec.validate()?;
        match spec.format {
            SourceFormat::Y4m => {
                let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
                Ok(FrameReader::Y4m(Y4mReader::new(BufReader::new(file))?))
            }
            SourceFormat::RawYuv => {
                let (width, height) = spec.geometry.expect("validated");
                let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
                let len = file.metadata().map_err(|e| Error::io(&spec.path, e))?.len();
                Ok(FrameReader::Raw(RawReader::new(
                    BufReader::new(file),
                    Some(len),
                    width,
                    height,
                    spec.layout,
                )?))
            }
            SourceFormat::ImageSequence => Ok(FrameReader::Sequence(ImageSequenceReader::open(&spec.path)?)),
        }
    }
}

impl Iterator for FrameReader {
    type Item = Result<LumaFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            FrameReader::Y4m(r) => r.next(),
            FrameReader::Raw(r) => r.next(),
            FrameReader::Sequence(r) => r.next(),
        }
    }
}

/// Reads every frame of `spec` in presentation order.
pub fn load_frame_sequence(spec: &SourceSpec) -> Result<Vec<LumaFrame>> {
    FrameReader::open(spec)?.collect()
}
