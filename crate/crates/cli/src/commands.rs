use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use blockwatch_core::blockiness::{frame_blockiness, BlockinessConfig, BucketAxis};
use blockwatch_core::frame_io::{parse_report_json, render_blocks_csv, render_report, ReportFormat};
use blockwatch_core::numfmt::{fixed, Six};
use blockwatch_core::seba::{analyze_frame, SebaConfig};
use blockwatch_core::synth::{make_test_sequence_with_noise, write_corpus, CorpusSidecar, PatternKind, PatternSpec};
use blockwatch_core::temporal::{parse_ground_truth, DetectionConfig, WindowMode};
use blockwatch_core::{
    detect_sequence, evaluate_detection, load_frame_sequence, AnalysisConfig, DetectionReport, Error as CoreError,
    LumaFrame, PixelLayout, SourceFormat, SourceSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::{EXIT_IO, EXIT_USAGE};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(CoreError::InvalidParameter(_)) => EXIT_USAGE,
            _ => EXIT_IO,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Measure(a) => measure(a, out),
        Command::Detect(a) => detect(a, out),
        Command::Seba(a) => seba(a, out),
        Command::Synth(a) => synth(a, out),
        Command::Evaluate(a) => evaluate(a, out),
    }
}

fn emit(text: &str, dest: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match dest {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        }),
        None => out
            .write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Output {
                path: "standard output".into(),
                source,
            }),
    }
}

fn core_layout(layout: Layout) -> PixelLayout {
    match layout {
        Layout::Yuv420 => PixelLayout::Yuv420,
        Layout::Yuv422 => PixelLayout::Yuv422,
        Layout::YOnly => PixelLayout::YOnly,
    }
}

fn report_format(f: Option<OutputFormat>, default: ReportFormat) -> ReportFormat {
    match f {
        Some(OutputFormat::Json) => ReportFormat::Json,
        Some(OutputFormat::Csv) => ReportFormat::Csv,
        None => default,
    }
}

fn guess_format(path: &Path) -> Result<SourceFormat> {
    if path.is_dir() {
        return Ok(SourceFormat::ImageSequence);
    }
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("y4m") => Ok(SourceFormat::Y4m),
        Some("yuv" | "raw" | "y") => Ok(SourceFormat::RawYuv),
        _ => Err(CliError::Input(format!(
            "cannot tell the format of {}; pass --format",
            path.display()
        ))),
    }
}

/// Geometry and layout recorded in a corpus sidecar next to `video`.
fn sidecar_geometry(video: &Path) -> Option<(usize, usize, PixelLayout)> {
    let text = fs::read_to_string(video.with_extension("json")).ok()?;
    let meta: CorpusSidecar = serde_json::from_str(&text).ok()?;
    Some((meta.width, meta.height, meta.layout.parse().ok()?))
}

fn source_spec(
    path: &Path,
    format: Option<InputFormat>,
    width: Option<usize>,
    height: Option<usize>,
    layout: Option<Layout>,
) -> Result<SourceSpec> {
    let format = match format {
        Some(InputFormat::Y4m) => SourceFormat::Y4m,
        Some(InputFormat::RawYuv) => SourceFormat::RawYuv,
        Some(InputFormat::ImageSequence) => SourceFormat::ImageSequence,
        None => guess_format(path)?,
    };
    match format {
        SourceFormat::RawYuv => {
            let recorded = sidecar_geometry(path);
            let (w, h) = match (width, height, recorded) {
                (Some(w), Some(h), _) => (w, h),
                (None, None, Some((w, h, _))) => (w, h),
                _ => return Err(CliError::Input("raw-yuv input needs both --width and --height".into())),
            };
            let layout = match (layout, recorded) {
                (Some(l), _) => core_layout(l),
                (None, Some((_, _, l))) => l,
                (None, None) => PixelLayout::Yuv420,
            };
            Ok(SourceSpec::raw(path, w, h, layout))
        }
        other => {
            if width.is_some() || height.is_some() || layout.is_some() {
                return Err(CliError::Input(format!(
                    "--width, --height and --layout only apply to raw-yuv input, not {other}"
                )));
            }
            Ok(match other {
                SourceFormat::Y4m => SourceSpec::y4m(path),
                _ => SourceSpec::image_sequence(path),
            })
        }
    }
}

fn load(input: &InputArgs) -> Result<Vec<LumaFrame>> {
    let spec = source_spec(&input.input, input.format, input.width, input.height, input.layout)?;
    let frames = load_frame_sequence(&spec)?;
    if frames.is_empty() {
        return Err(CoreError::EmptyInput.into());
    }
    Ok(frames)
}

fn blockiness_config(a: &BlockinessArgs) -> BlockinessConfig {
    BlockinessConfig {
        delta: a.delta,
        scale: a.scale,
        clip_margin: a.clip_margin,
        axis: match a.axis {
            Axis::Columns => BucketAxis::Columns,
            Axis::Rows => BucketAxis::Rows,
        },
        offset_correction: a.offset_correction,
    }
}

fn detection_config(a: &DetectionArgs) -> DetectionConfig {
    DetectionConfig {
        beta: a.beta,
        window: a.window,
        epsilon: a.epsilon,
        mode: match a.window_mode {
            Mode::Centered => WindowMode::Centered,
            Mode::Trailing => WindowMode::Trailing,
        },
    }
}

fn seba_config(a: &SebaTuning) -> SebaConfig {
    SebaConfig {
        th_fix: a.th_fix,
        texture_count: a.texture_count,
        ems_floor: a.ems_floor,
        block_size: a.block_size,
        max_shift: a.max_shift,
        ..SebaConfig::default()
    }
}

#[derive(Serialize)]
struct MeasureRow {
    frame_index: usize,
    score: Six,
    boundary_offset: usize,
}

fn measure(a: MeasureArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = blockiness_config(&a.blockiness);
    cfg.validate()?;
    let frames = load(&a.input)?;
    let scores = frames
        .par_iter()
        .map(|f| frame_blockiness(f, &cfg))
        .collect::<blockwatch_core::Result<Vec<_>>>()?;
    let text = match report_format(a.output.report_format, ReportFormat::Csv) {
        ReportFormat::Csv => {
            let mut s = String::from("frame_index,score,boundary_offset\n");
            for (f, sc) in frames.iter().zip(&scores) {
                let _ = writeln!(s, "{},{},{}", f.frame_index(), fixed(sc.value), sc.boundary_offset);
            }
            s
        }
        ReportFormat::Json => {
            let rows: Vec<MeasureRow> = frames
                .iter()
                .zip(&scores)
                .map(|(f, sc)| MeasureRow {
                    frame_index: f.frame_index(),
                    score: Six(sc.value),
                    boundary_offset: sc.boundary_offset,
                })
                .collect();
            to_json(&rows)?
        }
    };
    emit(&text, a.output.out.as_deref(), out)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(CoreError::from)?;
    s.push('\n');
    Ok(s)
}

fn detect(a: DetectArgs, out: &mut dyn Write) -> Result<()> {
    let config = AnalysisConfig {
        blockiness: blockiness_config(&a.blockiness),
        detection: detection_config(&a.detection),
        seba: seba_config(&a.seba),
        seed: a.seed,
    };
    config.validate()?;
    let frames = load(&a.input)?;
    let mut report = detect_sequence(&frames, &config)?;
    if a.analyze_blocks {
        let flagged: BTreeSet<usize> = report.flagged().into_iter().collect();
        let mut blocks = Vec::new();
        for f in frames.iter().filter(|f| flagged.contains(&f.frame_index())) {
            blocks.extend(
                analyze_frame(f, &config.seba)?
                    .iter()
                    .map(|r| r.summary(f.frame_index())),
            );
        }
        report.blocks = Some(blocks);
    }
    let text = render_report(&report, report_format(a.output.report_format, ReportFormat::Json))?;
    emit(&text, a.output.out.as_deref(), out)
}

fn seba(a: SebaArgs, out: &mut dyn Write) -> Result<()> {
    let config = AnalysisConfig {
        seba: seba_config(&a.seba),
        ..AnalysisConfig::default()
    };
    config.validate()?;
    let frames = load(&a.input)?;
    let mut blocks = Vec::new();
    let mut dump = String::from("frame_index,x,y,bin,count\n");
    for f in &frames {
        for region in analyze_frame(f, &config.seba)? {
            if a.histogram_dump.is_some() {
                for (bin, count) in region.histogram.bins().iter().enumerate() {
                    let _ = writeln!(
                        dump,
                        "{},{},{},{bin},{count}",
                        f.frame_index(),
                        region.region.x,
                        region.region.y
                    );
                }
            }
            blocks.push(region.summary(f.frame_index()));
        }
    }
    if let Some(path) = &a.histogram_dump {
        emit(&dump, Some(path), out)?;
    }
    let text = match report_format(a.output.report_format, ReportFormat::Json) {
        ReportFormat::Csv => render_blocks_csv(&blocks),
        ReportFormat::Json => {
            let mut report = DetectionReport::new(config);
            report.blocks = Some(blocks);
            render_report(&report, ReportFormat::Json)?
        }
    };
    emit(&text, a.output.out.as_deref(), out)
}

fn synth(a: SynthArgs, out: &mut dyn Write) -> Result<()> {
    let kind = match a.pattern {
        Pattern::BlockGrid => PatternKind::BlockGrid,
        Pattern::Stripes => PatternKind::Stripes,
        Pattern::Checkerboard => PatternKind::Checkerboard,
        Pattern::BurstNoise => PatternKind::BurstNoise,
    };
    let spec = PatternSpec {
        kind,
        period: a.period,
        period_y: a.period_y,
        phase: a.phase,
        orientation: a.orientation,
        amplitude: a.amplitude,
        width: a.width,
        height: a.height,
        region: None,
        seed: a.seed,
    };
    let distorted: BTreeSet<usize> = a.distorted.iter().copied().collect();
    let seq = make_test_sequence_with_noise(a.frames, &distorted, &spec, a.seed, a.noise)?;
    let paths = write_corpus(&a.out, &seq, &spec, a.seed)?;
    let summary = format!(
        "wrote {} frames of {}x{} to {}\nground truth: {}\n",
        seq.frames.len(),
        a.width,
        a.height,
        paths.video.display(),
        paths.sidecar.display()
    );
    emit(&summary, None, out)
}

#[derive(Serialize)]
struct EvaluationOutput {
    correct: usize,
    missed: usize,
    false_alarms: usize,
    precision: Six,
    recall: Six,
    efficiency: Six,
}

fn read_text(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn evaluate(a: EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let truth = parse_ground_truth(&read_text(&a.ground_truth)?)?;
    let detected: BTreeSet<usize> = match (&a.report, &a.input) {
        (Some(report), _) => parse_report_json(&read_text(report)?)?.flagged().into_iter().collect(),
        (None, Some(input)) => {
            let config = AnalysisConfig {
                blockiness: blockiness_config(&a.blockiness),
                detection: detection_config(&a.detection),
                ..AnalysisConfig::default()
            };
            config.validate()?;
            let spec = source_spec(input, a.format, a.width, a.height, a.layout)?;
            let frames = load_frame_sequence(&spec)?;
            detect_sequence(&frames, &config)?.flagged().into_iter().collect()
        }
        (None, None) => return Err(CliError::Usage("pass --report or --input".into())),
    };
    let m = evaluate_detection(&detected, &truth);
    let result = EvaluationOutput {
        correct: m.correct,
        missed: m.missed,
        false_alarms: m.false_alarms,
        precision: Six(m.precision),
        recall: Six(m.recall),
        efficiency: Six(m.efficiency),
    };
    let text = match report_format(a.output.report_format, ReportFormat::Csv) {
        ReportFormat::Json => to_json(&result)?,
        ReportFormat::Csv => format!(
            "correct,missed,false_alarms,precision,recall,efficiency\n{},{},{},{},{},{}\n",
            m.correct,
            m.missed,
            m.false_alarms,
            fixed(m.precision),
            fixed(m.recall),
            fixed(m.efficiency)
        ),
    };
    emit(&text, a.output.out.as_deref(), out)
}
