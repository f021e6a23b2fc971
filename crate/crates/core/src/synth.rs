//! Deterministic synthetic frames and sequences with known distortions.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`, so a
//! `(spec, seed)` pair always yields the same bytes.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{LumaFrame, Rect};
use crate::frame_io::PixelLayout;

/// Peak per-pixel deviation of the clean-frame noise.
pub const DEFAULT_NOISE_AMPLITUDE: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternKind {
    /// Alternating flat blocks whose boundaries sit on `phase mod period`.
    BlockGrid,
    /// Sinusoidal grating whose lines run at `orientation` degrees.
    Stripes,
    /// Axis-aligned checkerboard repeating every `period × period_y`.
    Checkerboard,
    /// Independent random offset per block.
    BurstNoise,
}

impl FromStr for PatternKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block-grid" | "grid" => Ok(Self::BlockGrid),
            "stripes" => Ok(Self::Stripes),
            "checkerboard" => Ok(Self::Checkerboard),
            "burst-noise" | "burst" => Ok(Self::BurstNoise),
            other => Err(Error::param(format!("unknown pattern kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub period: usize,
    /// Vertical period for checkerboards; `period` when unset.
    pub period_y: Option<usize>,
    pub phase: usize,
    /// Line angle in degrees: 0 draws horizontal lines, 90 vertical ones.
    pub orientation: f64,
    pub amplitude: f64,
    pub width: usize,
    pub height: usize,
    /// Where the pattern is applied; the whole frame when unset.
    pub region: Option<Rect>,
    pub seed: u64,
}

impl PatternSpec {
    pub fn new(kind: PatternKind, width: usize, height: usize) -> Self {
        Self {
            kind,
            period: 8,
            period_y: None,
            phase: 0,
            orientation: 0.0,
            amplitude: 32.0,
            width,
            height,
            region: None,
            seed: 0,
        }
    }

    pub fn block_grid(width: usize, height: usize, period: usize, phase: usize, amplitude: f64) -> Self {
        Self {
            period,
            phase,
            amplitude,
            ..Self::new(PatternKind::BlockGrid, width, height)
        }
    }

    pub fn stripes(width: usize, height: usize, period: usize, orientation: f64, amplitude: f64) -> Self {
        Self {
            period,
            orientation,
            amplitude,
            ..Self::new(PatternKind::Stripes, width, height)
        }
    }

    pub fn checkerboard(width: usize, height: usize, period_x: usize, period_y: usize, amplitude: f64) -> Self {
        Self {
            period: period_x,
            period_y: Some(period_y),
            amplitude,
            ..Self::new(PatternKind::Checkerboard, width, height)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.period < 2 || self.period_y.is_some_and(|p| p < 2) {
            return Err(Error::param("pattern period must be at least 2"));
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 255.0) {
            return Err(Error::param(format!("amplitude {} outside (0, 255]", self.amplitude)));
        }
        if !(0.0..=90.0).contains(&self.orientation) {
            return Err(Error::param(format!(
                "orientation {} outside [0, 90]",
                self.orientation
            )));
        }
        if let Some(r) = self.region {
            r.check_within(self.width, self.height)?;
        }
        Ok(())
    }

    fn support(&self) -> Rect {
        self.region.unwrap_or(Rect::new(0, 0, self.width, self.height))
    }
}

/// Step profile of alternating blocks, with the boundary sample halfway.
fn block_profile(v: usize, period: usize, phase: usize) -> f64 {
    let shifted = v as isize - phase as isize;
    if shifted.rem_euclid(period as isize) == 0 {
        return 0.5;
    }
    if shifted.div_euclid(period as isize).rem_euclid(2) == 0 {
        1.0
    } else {
        0.0
    }
}

fn pattern_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Uniform integer in `-span..=span`.
fn symmetric(rng: &mut ChaCha8Rng, span: u32) -> i32 {
    (rng.next_u32() % (2 * span + 1)) as i32 - span as i32
}

/// Overlays the pattern described by `spec` onto `base`.
pub fn inject_block_pattern(base: &LumaFrame, spec: &PatternSpec) -> Result<LumaFrame> {
    spec.validate()?;
    if (base.width(), base.height()) != (spec.width, spec.height) {
        return Err(Error::param(format!(
            "pattern is {}x{} but frame is {}x{}",
            spec.width,
            spec.height,
            base.width(),
            base.height()
        )));
    }
    let support = spec.support();
    let a = spec.amplitude;
    let offsets: Vec<f64> = match spec.kind {
        PatternKind::BurstNoise => {
            let blocks_x = support.right().div_ceil(spec.period) + 1;
            let blocks_y = support.bottom().div_ceil(spec.period) + 1;
            let mut rng = pattern_rng(spec.seed, 1);
            (0..blocks_x * blocks_y)
                .map(|_| symmetric(&mut rng, a as u32) as f64)
                .collect()
        }
        _ => Vec::new(),
    };
    let theta = spec.orientation.to_radians();
    let (sin_t, cos_t) = (theta.sin(), theta.cos());
    let py = spec.period_y.unwrap_or(spec.period);

    let delta = |x: usize, y: usize| -> f64 {
        match spec.kind {
            PatternKind::BlockGrid => {
                a * (block_profile(x, spec.period, spec.phase) + block_profile(y, spec.period, spec.phase) - 1.0)
            }
            PatternKind::Stripes => {
                let u = x as f64 * sin_t + y as f64 * cos_t - spec.phase as f64;
                a * (2.0 * PI * u / spec.period as f64).sin()
            }
            PatternKind::Checkerboard => {
                let xs = (x + spec.period - spec.phase % spec.period) % spec.period;
                let on = (xs < spec.period / 2) ^ (y % py < py / 2);
                if on {
                    a / 2.0
                } else {
                    -a / 2.0
                }
            }
            PatternKind::BurstNoise => {
                let bx = (x + spec.period - spec.phase % spec.period) / spec.period;
                let by = (y + spec.period - spec.phase % spec.period) / spec.period;
                let stride = support.right().div_ceil(spec.period) + 1;
                offsets[by * stride + bx]
            }
        }
    };

    let mut samples = base.samples().to_vec();
    let w = base.width();
    for y in support.y..support.bottom() {
        for x in support.x..support.right() {
            let v = base.get(x, y) as f64 + delta(x, y);
            samples[y * w + x] = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    LumaFrame::new(w, base.height(), samples, base.frame_index())
}

/// Smooth, seed-dependent background shared by every frame of a sequence.
pub fn make_scene(width: usize, height: usize, seed: u64) -> Result<LumaFrame> {
    let mut rng = pattern_rng(seed, 2);
    let mut unit = || rng.next_u32() as f64 / u32::MAX as f64;
    let (fx, fy, px, py) = (
        2.0 + 3.0 * unit(),
        1.5 + 2.5 * unit(),
        2.0 * PI * unit(),
        2.0 * PI * unit(),
    );
    let tilt = 30.0 * (unit() - 0.5);
    LumaFrame::from_fn(width, height, |x, y| {
        let u = x as f64 / width as f64;
        let v = y as f64 / height as f64;
        let s = 120.0 + 45.0 * (2.0 * PI * fx * u + px).sin() * (2.0 * PI * fy * v + py).cos() + tilt * (u - v);
        s.round().clamp(0.0, 255.0) as u8
    })
}

/// Adds independent noise in `-amplitude..=amplitude` to every sample.
pub fn add_noise(frame: &LumaFrame, amplitude: u8, seed: u64, stream: u64) -> Result<LumaFrame> {
    if amplitude == 0 {
        return Ok(frame.clone());
    }
    let mut rng = pattern_rng(seed, stream.wrapping_add(3));
    let samples = frame
        .samples()
        .iter()
        .map(|&s| (s as i32 + symmetric(&mut rng, amplitude as u32)).clamp(0, 255) as u8)
        .collect();
    LumaFrame::new(frame.width(), frame.height(), samples, frame.frame_index())
}

/// A generated sequence with the indices of its distorted frames.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSequence {
    pub frames: Vec<LumaFrame>,
    pub distorted: BTreeSet<usize>,
}

/// `length` noisy copies of a fixed scene; frames listed in `distorted`
/// additionally carry `spec`'s pattern.
pub fn make_test_sequence(
    length: usize,
    distorted: &BTreeSet<usize>,
    spec: &PatternSpec,
    seed: u64,
) -> Result<TestSequence> {
    make_test_sequence_with_noise(length, distorted, spec, seed, DEFAULT_NOISE_AMPLITUDE)
}

pub fn make_test_sequence_with_noise(
    length: usize,
    distorted: &BTreeSet<usize>,
    spec: &PatternSpec,
    seed: u64,
    noise: u8,
) -> Result<TestSequence> {
    spec.validate()?;
    if let Some(&bad) = distorted.range(length..).next() {
        return Err(Error::param(format!("distorted frame {bad} is beyond length {length}")));
    }
    let scene = make_scene(spec.width, spec.height, seed)?;
    let mut frames = Vec::with_capacity(length);
    for i in 0..length {
        let clean = add_noise(&scene.clone().with_index(i), noise, seed, i as u64)?;
        let frame = if distorted.contains(&i) {
            let per_frame = PatternSpec {
                seed: spec.seed ^ (i as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
                ..spec.clone()
            };
            inject_block_pattern(&clean, &per_frame)?
        } else {
            clean
        };
        frames.push(frame);
    }
    Ok(TestSequence {
        frames,
        distorted: distorted.clone(),
    })
}

/// Ground-truth sidecar written next to a raw corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSidecar {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub layout: String,
    pub seed: u64,
    pub pattern: PatternSpec,
    pub distorted: Vec<usize>,
}

/// Paths of a written corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPaths {
    pub video: PathBuf,
    pub sidecar: PathBuf,
}

/// Writes luma-only raw frames to `video` and the ground truth to the
/// same path with a `.json` extension.
pub fn write_corpus(video: &Path, seq: &TestSequence, spec: &PatternSpec, seed: u64) -> Result<CorpusPaths> {
    let sidecar = video.with_extension("json");
    let mut out = Vec::with_capacity(seq.frames.iter().map(|f| f.samples().len()).sum());
    for f in &seq.frames {
        out.extend_from_slice(f.samples());
    }
    fs::write(video, &out).map_err(|e| Error::io(video, e))?;
    let meta = CorpusSidecar {
        width: spec.width,
        height: spec.height,
        frames: seq.frames.len(),
        layout: PixelLayout::YOnly.to_string(),
        seed,
        pattern: spec.clone(),
        distorted: seq.distorted.iter().copied().collect(),
    };
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    fs::File::create(&sidecar)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| Error::io(&sidecar, e))?;
    Ok(CorpusPaths {
        video: video.to_path_buf(),
        sidecar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockiness::{accumulate_buckets, frame_blockiness, BlockinessConfig};
    use crate::gradient::kirsch_gradient;
    use proptest::prelude::*;

    #[test]
    fn amplitude_must_be_positive() {
        let base = LumaFrame::filled(16, 16, 100).unwrap();
        let spec = PatternSpec::block_grid(16, 16, 8, 0, 0.0);
        assert!(inject_block_pattern(&base, &spec).is_err());
        let spec = PatternSpec {
            orientation: 95.0,
            ..PatternSpec::stripes(16, 16, 8, 0.0, 10.0)
        };
        assert!(spec.validate().is_err());
        let spec = PatternSpec::block_grid(16, 16, 1, 0, 10.0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn grid_phase_lands_in_bucket() {
        let base = LumaFrame::filled(64, 64, 128).unwrap();
        let f = inject_block_pattern(&base, &PatternSpec::block_grid(64, 64, 8, 3, 40.0)).unwrap();
        let b = accumulate_buckets(&kirsch_gradient(&f), 8, 0).unwrap();
        assert_eq!(b.argmax(), 3);
        assert_eq!(
            frame_blockiness(&f, &BlockinessConfig::default())
                .unwrap()
                .boundary_offset,
            3
        );
    }

    #[test]
    fn boundary_samples_take_midpoint() {
        let base = LumaFrame::filled(16, 16, 100).unwrap();
        let f = inject_block_pattern(&base, &PatternSpec::block_grid(16, 16, 4, 1, 40.0)).unwrap();
        // Row 2 sits inside an "on" block vertically.
        let row: Vec<u8> = f.row(2).to_vec();
        assert_eq!(&row[..6], &[100, 120, 140, 140, 140, 120]);
    }

    #[test]
    fn stripes_follow_line_angle() {
        let base = LumaFrame::filled(32, 32, 128).unwrap();
        let horiz = inject_block_pattern(&base, &PatternSpec::stripes(32, 32, 16, 0.0, 100.0)).unwrap();
        assert!((0..32).all(|x| horiz.get(x, 5) == horiz.get(0, 5)));
        let vert = inject_block_pattern(&base, &PatternSpec::stripes(32, 32, 16, 90.0, 100.0)).unwrap();
        assert!((0..32).all(|y| vert.get(5, y) == vert.get(5, 0)));
    }

    #[test]
    fn region_limits_support() {
        let base = LumaFrame::filled(32, 32, 90).unwrap();
        let spec = PatternSpec {
            region: Some(Rect::new(8, 8, 16, 8)),
            ..PatternSpec::checkerboard(32, 32, 8, 8, 60.0)
        };
        let f = inject_block_pattern(&base, &spec).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                let inside = (8..24).contains(&x) && (8..16).contains(&y);
                if !inside {
                    assert_eq!(f.get(x, y), 90);
                } else {
                    assert!(f.get(x, y) == 60 || f.get(x, y) == 120);
                }
            }
        }
    }

    #[test]
    fn clean_sequence_has_no_truth() {
        let spec = PatternSpec::block_grid(32, 32, 8, 0, 30.0);
        let seq = make_test_sequence(10, &BTreeSet::new(), &spec, 5).unwrap();
        assert_eq!(seq.frames.len(), 10);
        assert!(seq.distorted.is_empty());
        assert_eq!(seq.frames[7].frame_index(), 7);
    }

    #[test]
    fn distortion_outside_sequence_rejected() {
        let spec = PatternSpec::block_grid(16, 16, 8, 0, 30.0);
        assert!(make_test_sequence(5, &BTreeSet::from([5]), &spec, 1).is_err());
    }

    #[test]
    fn corpus_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = PatternSpec::block_grid(16, 8, 8, 0, 30.0);
        let seq = make_test_sequence(4, &BTreeSet::from([2]), &spec, 9).unwrap();
        let paths = write_corpus(&dir.path().join("c.yuv"), &seq, &spec, 9).unwrap();
        assert_eq!(fs::metadata(&paths.video).unwrap().len(), 4 * 16 * 8);
        let meta: CorpusSidecar = serde_json::from_str(&fs::read_to_string(&paths.sidecar).unwrap()).unwrap();
        assert_eq!(meta.distorted, vec![2]);
        assert_eq!(meta.layout, "y-only");
    }

    proptest! {
        #[test]
        fn pure_function_of_seed(seed in any::<u64>(), at in 0usize..6) {
            let spec = PatternSpec { seed: seed.rotate_left(7), ..PatternSpec::new(PatternKind::BurstNoise, 24, 16) };
            let truth = BTreeSet::from([at]);
            let a = make_test_sequence(6, &truth, &spec, seed).unwrap();
            let b = make_test_sequence(6, &truth, &spec, seed).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn pattern_changes_only_support(x in 0usize..20, y in 0usize..20, w in 1usize..12, h in 1usize..12, kind in 0usize..4) {
            let kinds = [PatternKind::BlockGrid, PatternKind::Stripes, PatternKind::Checkerboard, PatternKind::BurstNoise];
            let base = make_scene(32, 32, 4).unwrap();
            let region = Rect::new(x, y, w, h);
            let spec = PatternSpec { region: Some(region), ..PatternSpec::new(kinds[kind], 32, 32) };
            let f = inject_block_pattern(&base, &spec).unwrap();
            for yy in 0..32 {
                for xx in 0..32 {
                    let inside = xx >= x && xx < x + w && yy >= y && yy < y + h;
                    if !inside {
                        prop_assert_eq!(f.get(xx, yy), base.get(xx, yy));
                    }
                }
            }
        }
    }
}
