//! Sliding-window statistics over per-frame blockiness and the
//! distorted-frame criterion.
//!
//! The window deviation is the unnormalized root of summed squared
//! deviations, `σ = sqrt(Σ (B − M)²)`; it is *not* divided by the window
//! length. A frame `n` is distorted when
//! `|σ_n − σ_{n−1}| / max(|B(n) − B(n−1)|, ε) ≥ β²`.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockiness::{frame_blockiness, BlockinessConfig, BlockinessScore};
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::frame::LumaFrame;
use crate::frame_io::{DetectionReport, FrameRecord, Verdict};
use crate::numfmt;

pub const DEFAULT_BETA: f64 = 1.5;
pub const DEFAULT_WINDOW: usize = 7;
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Placement of the statistics window relative to the scored frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowMode {
    /// `(N−1)/2` frames either side; verdicts lag the input by that many frames.
    #[default]
    Centered,
    /// The current frame and the `N−1` frames before it.
    Trailing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    #[serde(with = "numfmt::six")]
    pub beta: f64,
    pub window: usize,
    #[serde(with = "numfmt::six")]
    pub epsilon: f64,
    pub mode: WindowMode,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            window: DEFAULT_WINDOW,
            epsilon: DEFAULT_EPSILON,
            mode: WindowMode::Centered,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::param(format!("beta {} must be positive", self.beta)));
        }
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::param(format!(
                "window {} must be odd and at least 3",
                self.window
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::param(format!("epsilon {} must be positive", self.epsilon)));
        }
        Ok(())
    }
}

/// Bounded run of consecutive `(frame_index, score)` pairs with a running sum.
#[derive(Debug, Clone)]
pub struct ScoreWindow {
    capacity: usize,
    entries: VecDeque<(usize, f64)>,
    sum: f64,
}

impl ScoreWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
            sum: 0.0,
        }
    }

    /// Appends a score, evicting the oldest entry when full.
    ///
    /// Panics if `frame_index` does not follow the newest entry.
    pub fn push(&mut self, frame_index: usize, score: f64) {
        if let Some(&(last, _)) = self.entries.back() {
            assert_eq!(frame_index, last + 1, "window indices must be consecutive");
        }
        if self.entries.len() == self.capacity {
            if let Some((_, old)) = self.entries.pop_front() {
                self.sum -= old;
            }
        }
        self.entries.push_back((frame_index, score));
        self.sum += score;
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.sum = 0.0;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() == self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// `F_r`, the running sum.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn first_index(&self) -> Option<usize> {
        self.entries.front().map(|e| e.0)
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    /// `(M, σ)` of the current contents.
    pub fn stats(&self) -> Result<(f64, f64)> {
        if self.entries.is_empty() {
            return Err(Error::EmptyWindow);
        }
        // Recompute the sum here: the running total drifts after many evictions.
        let scores: Vec<f64> = self.scores().collect();
        window_stats(&scores)
    }
}

/// Mean and unnormalized deviation `sqrt(Σ (B − M)²)` of a score run.
pub fn window_stats(scores: &[f64]) -> Result<(f64, f64)> {
    if scores.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    let sq: f64 = scores.iter().map(|b| (b - mean) * (b - mean)).sum();
    Ok((mean, sq.sqrt()))
}

/// Score and window deviation of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStat {
    pub score: f64,
    pub sigma: f64,
}

/// Detection ratio `|Δσ| / max(|ΔB|, ε)`.
pub fn criterion_ratio(curr: FrameStat, prev: FrameStat, epsilon: f64) -> f64 {
    (curr.sigma - prev.sigma).abs() / (curr.score - prev.score).abs().max(epsilon)
}

/// Applies the β² threshold to a pair of consecutive frames.
pub fn is_distorted(curr: FrameStat, prev: FrameStat, cfg: &DetectionConfig) -> bool {
    criterion_ratio(curr, prev, cfg.epsilon) >= cfg.beta * cfg.beta
}

/// Window statistics and verdicts for an already-scored sequence.
///
/// `scores[i]` belongs to frame `first_index + i`. Frames without a full
/// window for themselves and their predecessor are reported as
/// [`Verdict::InsufficientWindow`].
pub fn score_verdicts(
    scores: &[BlockinessScore],
    first_index: usize,
    cfg: &DetectionConfig,
) -> Result<Vec<FrameRecord>> {
    cfg.validate()?;
    let n = scores.len();
    let (before, after) = match cfg.mode {
        WindowMode::Centered => ((cfg.window - 1) / 2, (cfg.window - 1) / 2),
        WindowMode::Trailing => (cfg.window - 1, 0),
    };

    // Single sequential fold: slide the window once over the scores and
    // record the statistics of each full window at its anchor frame.
    let mut stats: Vec<Option<(f64, f64)>> = vec![None; n];
    let mut window = ScoreWindow::new(cfg.window);
    for (i, s) in scores.iter().enumerate() {
        window.push(first_index + i, s.value);
        if window.is_full() {
            let anchor = i - after;
            stats[anchor] = Some(window.stats()?);
        }
    }
    debug_assert!(stats
        .iter()
        .enumerate()
        .all(|(i, s)| s.is_some() == (i >= before && i + after < n)));

    let mut records = Vec::with_capacity(n);
    for (i, s) in scores.iter().enumerate() {
        let (mean, sigma) = match stats[i] {
            Some((m, sd)) => (Some(m), Some(sd)),
            None => (None, None),
        };
        let (ratio, verdict) = match (i.checked_sub(1).and_then(|p| stats[p]), stats[i]) {
            (Some((_, prev_sigma)), Some((_, sigma))) => {
                let curr = FrameStat { score: s.value, sigma };
                let prev = FrameStat {
                    score: scores[i - 1].value,
                    sigma: prev_sigma,
                };
                let ratio = criterion_ratio(curr, prev, cfg.epsilon);
                let verdict = if is_distorted(curr, prev, cfg) {
                    Verdict::Distorted
                } else {
                    Verdict::Ok
                };
                (Some(ratio), verdict)
            }
            _ => (None, Verdict::InsufficientWindow),
        };
        records.push(FrameRecord {
            frame_index: first_index + i,
            score: s.value,
            boundary_offset: s.boundary_offset,
            mean,
            sigma,
            ratio,
            verdict,
        });
    }
    Ok(records)
}

/// Scores every frame in parallel, then runs the temporal criterion.
pub fn score_frames(frames: &[LumaFrame], cfg: &BlockinessConfig) -> Result<Vec<BlockinessScore>> {
    cfg.validate()?;
    frames.par_iter().map(|f| frame_blockiness(f, cfg)).collect()
}

/// Blockiness, window statistics and verdicts for a frame sequence.
pub fn detect_sequence(frames: &[LumaFrame], config: &AnalysisConfig) -> Result<DetectionReport> {
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    config.detection.validate()?;
    let scores = score_frames(frames, &config.blockiness)?;
    let first = frames[0].frame_index();
    for (i, f) in frames.iter().enumerate() {
        if f.frame_index() != first + i {
            return Err(Error::InvalidFrame(format!(
                "frame indices are not consecutive at position {i} (index {})",
                f.frame_index()
            )));
        }
    }
    let mut report = DetectionReport::new(config.clone());
    report.frames = score_verdicts(&scores, first, &config.detection)?;
    Ok(report)
}

/// Correct, missed and false detections with the derived ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrMetrics {
    pub correct: usize,
    pub missed: usize,
    pub false_alarms: usize,
    pub precision: f64,
    pub recall: f64,
    pub efficiency: f64,
}

/// Precision `P/(P+P_F)`, recall `P/(P+P_M)` and their mean.
///
/// An empty denominator means there was nothing to get wrong, so the
/// corresponding ratio is 1.
pub fn evaluate_detection(detected: &BTreeSet<usize>, truth: &BTreeSet<usize>) -> PrMetrics {
    let correct = detected.intersection(truth).count();
    let false_alarms = detected.difference(truth).count();
    let missed = truth.difference(detected).count();
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let precision = ratio(correct, correct + false_alarms);
    let recall = ratio(correct, correct + missed);
    PrMetrics {
        correct,
        missed,
        false_alarms,
        precision,
        recall,
        efficiency: (precision + recall) / 2.0,
    }
}

/// Reads a ground-truth set of distorted frame indices.
///
/// Accepts either one index per line (blank lines and `#` comments are
/// skipped) or a JSON object with a `distorted` array, as written by the
/// corpus generator.
pub fn parse_ground_truth(text: &str) -> Result<BTreeSet<usize>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        #[derive(Deserialize)]
        struct Sidecar {
            distorted: Vec<usize>,
        }
        let sidecar: Sidecar = serde_json::from_str(trimmed)?;
        return Ok(sidecar.distorted.into_iter().collect());
    }
    let mut out = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let idx = line.parse::<usize>().map_err(|_| {
            Error::Malformed(format!(
                "ground truth line {}: {line:?} is not a frame index",
                lineno + 1
            ))
        })?;
        out.insert(idx);
    }
    Ok(out)
}
