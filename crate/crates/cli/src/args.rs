use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "blockwatch",
    version,
    about = "Blocking-artifact measurement and detection for video"
)]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-frame blockiness scores.
    Measure(MeasureArgs),
    /// Blockiness scores with temporal distortion verdicts.
    Detect(DetectArgs),
    /// Block classification, pattern orientation and pattern period.
    Seba(SebaArgs),
    /// Write a synthetic corpus with ground truth.
    Synth(SynthArgs),
    /// Precision, recall and efficiency of a detection run.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Y4m,
    RawYuv,
    ImageSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    #[value(name = "420")]
    Yuv420,
    #[value(name = "422")]
    Yuv422,
    YOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Columns,
    Rows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Centered,
    Trailing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pattern {
    BlockGrid,
    Stripes,
    Checkerboard,
    BurstNoise,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Video file, or directory of PGM frames.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Container format; guessed from the path when omitted.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Frame width, raw input only.
    #[arg(long)]
    pub width: Option<usize>,
    /// Frame height, raw input only.
    #[arg(long)]
    pub height: Option<usize>,
    /// Plane layout of raw input; 4:2:0 unless a corpus sidecar says otherwise.
    #[arg(long, value_enum)]
    pub layout: Option<Layout>,
}

#[derive(Debug, Args)]
pub struct BlockinessArgs {
    /// Coding block size in pixels.
    #[arg(long, default_value_t = 8)]
    pub delta: usize,
    /// Score scale factor.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Pixels ignored along every frame border.
    #[arg(long, default_value_t = 0)]
    pub clip_margin: usize,
    /// Bucket by column or by row position.
    #[arg(long, value_enum, default_value = "columns")]
    pub axis: Axis,
    /// Subtract the response half a block away from the grid.
    #[arg(long)]
    pub offset_correction: bool,
}

#[derive(Debug, Args)]
pub struct DetectionArgs {
    /// Criterion parameter; frames are flagged when the ratio reaches its square.
    #[arg(long, default_value_t = 1.5)]
    pub beta: f64,
    /// Odd number of frames in the statistics window.
    #[arg(long, default_value_t = 7)]
    pub window: usize,
    /// Lower bound on the score-difference denominator.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Window placement around each frame; trailing uses only past frames.
    #[arg(long, value_enum, default_value = "centered")]
    pub window_mode: Mode,
}

#[derive(Debug, Args)]
pub struct SebaTuning {
    /// Fraction below the strongest direction that still counts as dominant.
    #[arg(long, default_value_t = 0.2)]
    pub th_fix: f64,
    /// Dominant directions needed for a texture label.
    #[arg(long, default_value_t = 4)]
    pub texture_count: usize,
    /// Minimum strength of a dominant direction.
    #[arg(long, default_value_t = 1.0)]
    pub ems_floor: f64,
    /// Analyse square tiles of this size instead of whole frames.
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Longest shift tried for period recovery.
    #[arg(long)]
    pub max_shift: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output encoding; each subcommand has its own default.
    #[arg(long, value_enum)]
    pub report_format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub blockiness: BlockinessArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub blockiness: BlockinessArgs,
    #[command(flatten)]
    pub detection: DetectionArgs,
    #[command(flatten)]
    pub seba: SebaTuning,
    /// Also analyse blocks of every flagged frame.
    #[arg(long)]
    pub analyze_blocks: bool,
    /// Recorded in the report configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SebaArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub seba: SebaTuning,
    /// Write every region's 60-bin direction histogram as CSV.
    #[arg(long, value_name = "PATH")]
    pub histogram_dump: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Raw luma-only output; the ground truth goes next to it as .json.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Sequence length.
    #[arg(long, default_value_t = 180)]
    pub frames: usize,
    #[arg(long, default_value_t = 176)]
    pub width: usize,
    #[arg(long, default_value_t = 144)]
    pub height: usize,
    /// Comma-separated frame indices that receive the pattern.
    #[arg(long, value_delimiter = ',', default_value = "91,92,93")]
    pub distorted: Vec<usize>,
    #[arg(long, value_enum, default_value = "block-grid")]
    pub pattern: Pattern,
    /// Pattern contrast in intensity levels.
    #[arg(long, default_value_t = 32.0)]
    pub amplitude: f64,
    /// Pattern period in pixels.
    #[arg(long, default_value_t = 8)]
    pub period: usize,
    /// Vertical checkerboard period; same as --period when omitted.
    #[arg(long)]
    pub period_y: Option<usize>,
    /// Pattern offset in pixels.
    #[arg(long, default_value_t = 0)]
    pub phase: usize,
    /// Stripe line angle in degrees.
    #[arg(long, default_value_t = 0.0)]
    pub orientation: f64,
    /// Peak deviation of the per-frame noise.
    #[arg(long, default_value_t = 2)]
    pub noise: u8,
    /// Seed for the base scene, the noise and the burst pattern.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Distorted frame indices: one per line, or a corpus sidecar.
    #[arg(long, value_name = "PATH")]
    pub ground_truth: PathBuf,
    /// A JSON report from `detect`; detection runs on --input when omitted.
    #[arg(long, value_name = "PATH", conflicts_with = "input")]
    pub report: Option<PathBuf>,
    /// Video file, or directory of PGM frames.
    #[arg(long, value_name = "PATH", required_unless_present = "report")]
    pub input: Option<PathBuf>,
    /// Container format; guessed from the path when omitted.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Frame width, raw input only.
    #[arg(long)]
    pub width: Option<usize>,
    /// Frame height, raw input only.
    #[arg(long)]
    pub height: Option<usize>,
    /// Plane layout of raw input.
    #[arg(long, value_enum)]
    pub layout: Option<Layout>,
    #[command(flatten)]
    pub blockiness: BlockinessArgs,
    #[command(flatten)]
    pub detection: DetectionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
