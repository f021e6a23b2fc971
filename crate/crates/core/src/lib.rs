//! Blocking-artifact measurement and spatial error analysis for decoded video.
//!
//! The crate reads luma planes from Y4M, raw planar YUV or PGM sequences,
//! scores each frame for grid-aligned blockiness, flags frames whose score
//! jumps out of its temporal neighbourhood, and characterizes damaged
//! regions by texture class, pattern orientation and repeat period.

pub mod blockiness;
pub mod config;
pub mod error;
pub mod frame;
pub mod frame_io;
pub mod gradient;
pub mod numfmt;
pub mod seba;
pub mod synth;
pub mod temporal;

pub use blockiness::{frame_blockiness, BlockinessConfig, BlockinessScore, BucketAxis, BucketVector};
pub use config::AnalysisConfig;
pub use error::{Error, Result};
pub use frame::{LumaFrame, PixelBlock, Rect};
pub use frame_io::{
    load_frame_sequence, render_report, write_report, BlockSummary, DetectionReport, FrameReader, FrameRecord,
    PixelLayout, ReportFormat, SourceFormat, SourceSpec, Verdict,
};
pub use gradient::{kirsch_gradient, sobel_gradient, DirectionBin, GradientField, SobelField};
pub use seba::{BlockClass, SebaConfig};
pub use temporal::{detect_sequence, evaluate_detection, DetectionConfig, PrMetrics, WindowMode};
