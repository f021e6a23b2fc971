use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Rect;
use crate::gradient::{DirectionBin, SobelField, BIN_DEGREES, DIRECTION_BINS};
use crate::numfmt::Six;

/// Bins per quarter turn.
pub const QUADRANT_BINS: usize = DIRECTION_BINS / 4;

/// The twelve bins kept when no orientation is known: the three bins
/// around each axis direction.
pub const AXIS_BINS: [usize; 12] = [59, 0, 1, 14, 15, 16, 29, 30, 31, 44, 45, 46];

/// Counts of pixels per quantized gradient direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionHistogram {
    bins: [u64; DIRECTION_BINS],
    total: u64,
}

impl Default for DirectionHistogram {
    fn default() -> Self {
        Self {
            bins: [0; DIRECTION_BINS],
            total: 0,
        }
    }
}

impl DirectionHistogram {
    pub fn from_bins(bins: [u64; DIRECTION_BINS]) -> Self {
        Self {
            bins,
            total: bins.iter().sum(),
        }
    }

    pub fn bins(&self) -> &[u64; DIRECTION_BINS] {
        &self.bins
    }

    pub fn count(&self, bin: usize) -> u64 {
        self.bins[bin]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn add(&mut self, bin: DirectionBin) {
        self.bins[bin.index()] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &DirectionHistogram) {
        for (a, b) in self.bins.iter_mut().zip(other.bins.iter()) {
            *a += b;
        }
        self.total += other.total;
    }

    /// Full 60-bin accumulation over `region`.
    pub fn accumulate(field: &SobelField, region: Rect) -> Result<Self> {
        region.check_within(field.width(), field.height())?;
        let mut hist = Self::default();
        let w = field.width();
        for y in region.y..region.bottom() {
            let row = y * w;
            let sx = &field.sx_values()[row + region.x..row + region.right()];
            let sy = &field.sy_values()[row + region.x..row + region.right()];
            for (&gx, &gy) in sx.iter().zip(sy) {
                if let Some(bin) = DirectionBin::from_components(gx, gy) {
                    hist.add(bin);
                }
            }
        }
        Ok(hist)
    }

    /// Accumulates only the bins kept by `mask`.
    ///
    /// Equal to `accumulate(..).restricted(mask)`. When the mask repeats every
    /// quarter turn, a polynomial prefilter discards most pixels and the
    /// arctangent runs on the survivors only.
    pub fn accumulate_reduced(field: &SobelField, region: Rect, mask: &BinMask) -> Result<Self> {
        region.check_within(field.width(), field.height())?;
        let Some(arcs) = QuadrantArcs::new(mask) else {
            return Ok(Self::accumulate(field, region)?.restricted(mask));
        };
        let mut hist = Self::default();
        let w = field.width();
        let mut candidate = vec![false; region.width];
        for y in region.y..region.bottom() {
            let row = y * w;
            let sx = &field.sx_values()[row + region.x..row + region.right()];
            let sy = &field.sy_values()[row + region.x..row + region.right()];
            for ((c, &gx), &gy) in candidate.iter_mut().zip(sx).zip(sy) {
                *c = arcs.may_contain(gx, gy);
            }
            for (i, _) in candidate.iter().enumerate().filter(|(_, &c)| c) {
                if let Some(bin) = DirectionBin::from_components(sx[i], sy[i]) {
                    if mask.keeps(bin.index()) {
                        hist.add(bin);
                    }
                }
            }
        }
        Ok(hist)
    }

    /// Copy with every bin outside `mask` zeroed.
    pub fn restricted(&self, mask: &BinMask) -> Self {
        let mut bins = self.bins;
        for (k, b) in bins.iter_mut().enumerate() {
            if !mask.keeps(k) {
                *b = 0;
            }
        }
        Self::from_bins(bins)
    }

    /// `bin,count` lines for offline inspection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,count\n");
        for (k, c) in self.bins.iter().enumerate() {
            let _ = writeln!(out, "{k},{c}");
        }
        out
    }
}

/// Set of direction bins retained by a reduced histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinMask {
    keep: [bool; DIRECTION_BINS],
}

impl BinMask {
    pub fn from_bins(bins: impl IntoIterator<Item = usize>) -> Self {
        let mut keep = [false; DIRECTION_BINS];
        for b in bins {
            keep[b % DIRECTION_BINS] = true;
        }
        Self { keep }
    }

    /// The fixed twelve-bin set.
    pub fn axis_aligned() -> Self {
        Self::from_bins(AXIS_BINS)
    }

    /// Each significant bin of `orientation` together with its two neighbours.
    pub fn around(orientation: &PatternOrientation) -> Self {
        Self::from_bins(
            orientation
                .significant_bins
                .iter()
                .flat_map(|&s| [s as usize + DIRECTION_BINS - 1, s as usize, s as usize + 1]),
        )
    }

    pub fn keeps(&self, bin: usize) -> bool {
        self.keep[bin]
    }

    pub fn kept_bins(&self) -> Vec<usize> {
        (0..DIRECTION_BINS).filter(|&k| self.keep[k]).collect()
    }

    fn quarter_periodic(&self) -> bool {
        (0..DIRECTION_BINS).all(|k| self.keep[k] == self.keep[(k + QUADRANT_BINS) % DIRECTION_BINS])
    }
}

/// Restricts a histogram to the axis bins, or to the neighbourhood of the
/// significant bins when an orientation is known.
pub fn reduce_bins(hist: &DirectionHistogram, orientation: Option<&PatternOrientation>) -> DirectionHistogram {
    let mask = orientation.map_or_else(BinMask::axis_aligned, BinMask::around);
    hist.restricted(&mask)
}

/// Angular intervals covering the kept bins of one quadrant, padded
/// slightly so the prefilter never rejects a kept pixel.
///
/// Raising a gradient `(x, y)` to the fourth power as a complex number
/// multiplies its angle by four, so every quarter-turn copy of an interval
/// lands on the same arc. Intervals are split to stay under 45 degrees, which
/// keeps each scaled arc below a half turn where two cross products decide
/// membership.
struct QuadrantArcs {
    // (start, end) unit vectors of each arc in the scaled angle space.
    arcs: [([f64; 2], [f64; 2]); 8],
    len: usize,
}

const ARC_PAD_DEGREES: f64 = 0.01;
const MAX_ARC_BINS: usize = 7;

impl QuadrantArcs {
    fn new(mask: &BinMask) -> Option<Self> {
        if !mask.quarter_periodic() {
            return None;
        }
        let unit = |deg: f64| {
            let r = (4.0 * deg).to_radians();
            [r.cos(), r.sin()]
        };
        // Start scanning just after a dropped bin so runs that wrap past the
        // quadrant edge stay in one piece.
        let first_gap = (0..QUADRANT_BINS).find(|&k| !mask.keeps(k))?;
        let mut arcs = [([0.0; 2], [0.0; 2]); 8];
        let mut len = 0;
        let mut k = first_gap + 1;
        let end = first_gap + QUADRANT_BINS;
        while k < end {
            if !mask.keeps(k % QUADRANT_BINS) {
                k += 1;
                continue;
            }
            let start = k;
            while k < end && mask.keeps(k % QUADRANT_BINS) && k - start < MAX_ARC_BINS {
                k += 1;
            }
            let lo = start as f64 * BIN_DEGREES - ARC_PAD_DEGREES;
            let hi = k as f64 * BIN_DEGREES + ARC_PAD_DEGREES;
            arcs[len] = (unit(lo), unit(hi));
            len += 1;
        }
        Some(Self { arcs, len })
    }

    /// False for the zero vector and for directions outside every arc.
    #[inline]
    fn may_contain(&self, sx: i32, sy: i32) -> bool {
        // Components are bounded by 1020, so these products are exact.
        let (x, y) = (sx as f64, sy as f64);
        let (x2, y2, xy) = (x * x, y * y, x * y);
        let re = x2 * x2 - 6.0 * x2 * y2 + y2 * y2;
        let im = 4.0 * xy * (x2 - y2);
        let mut hit = false;
        for (a, b) in &self.arcs[..self.len] {
            hit |= (a[0] * im - a[1] * re >= 0.0) & (re * b[1] - im * b[0] > 0.0);
        }
        hit
    }
}

/// Circular weights applied across one quadrant of bins.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct RotationMask(pub [f64; QUADRANT_BINS]);

impl Serialize for RotationMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&w| Six(w)))
    }
}

impl RotationMask {
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !w.is_finite()) {
            return Err(Error::param("rotation mask weights must be finite"));
        }
        Ok(())
    }
}

impl Default for RotationMask {
    fn default() -> Self {
        let mut w = [0.0; QUADRANT_BINS];
        w[0] = 1.0;
        Self(w)
    }
}

/// Dominant orientation of a repetitive pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternOrientation {
    /// Winning shift; 15 rather than 0 when the gradients point along the
    /// vertical axis.
    pub high_bin: u8,
    /// `90 − 6 · high_bin`.
    pub offset_degrees: u32,
    pub significant_bins: [u8; 4],
}

impl PatternOrientation {
    pub fn from_high_bin(high_bin: usize) -> Result<Self> {
        if high_bin > QUADRANT_BINS {
            return Err(Error::param(format!("high bin {high_bin} outside 0..=15")));
        }
        let q = QUADRANT_BINS;
        let sig = [0, q, 2 * q, 3 * q].map(|o| ((high_bin + o) % DIRECTION_BINS) as u8);
        Ok(Self {
            high_bin: high_bin as u8,
            offset_degrees: (90 - BIN_DEGREES as usize * high_bin) as u32,
            significant_bins: sig,
        })
    }
}

/// Mask response for each of the fifteen quadrant shifts.
pub fn rotation_scores(hist: &DirectionHistogram, mask: &RotationMask) -> [f64; QUADRANT_BINS] {
    let mut folded = [0u64; QUADRANT_BINS];
    for (k, &c) in hist.bins().iter().enumerate() {
        folded[k % QUADRANT_BINS] += c;
    }
    let mut scores = [0.0; QUADRANT_BINS];
    for (s, score) in scores.iter_mut().enumerate() {
        *score = mask
            .0
            .iter()
            .enumerate()
            .map(|(j, w)| w * folded[(s + j) % QUADRANT_BINS] as f64)
            .sum();
    }
    scores
}

/// Pattern orientation from the best-responding quadrant shift.
///
/// Returns `None` for an empty histogram or when no shift responds.
pub fn rotation_offset(hist: &DirectionHistogram, mask: &RotationMask) -> Option<PatternOrientation> {
    if hist.is_empty() {
        return None;
    }
    let scores = rotation_scores(hist, mask);
    let mut best = 0;
    for s in 1..QUADRANT_BINS {
        if scores[s] > scores[best] {
            best = s;
        }
    }
    if scores[best] <= 0.0 {
        return None;
    }
    let h = hist.bins();
    if best == 0 && h[QUADRANT_BINS] + h[3 * QUADRANT_BINS] > h[0] + h[2 * QUADRANT_BINS] {
        best = QUADRANT_BINS;
    }
    PatternOrientation::from_high_bin(best).ok()
}
