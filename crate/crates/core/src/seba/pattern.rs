use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::Rect;
use crate::gradient::{DirectionBin, SobelField, DIRECTION_BINS};

/// Largest possible sum of two direction bins.
pub const MAX_BIN_SUM: usize = 2 * (DIRECTION_BINS - 1);

/// Fraction of the zero-shift agreement a re-peak must reach.
pub const PERIOD_PEAK_RATIO: f64 = 0.9;

const UNDEFINED: u8 = u8::MAX;

/// Quantized direction per pixel, `None` where the gradient vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionGrid {
    width: usize,
    height: usize,
    bins: Vec<u8>,
}

impl DirectionGrid {
    pub fn from_field(field: &SobelField, region: Rect) -> Result<Self> {
        region.check_within(field.width(), field.height())?;
        let mut bins = Vec::with_capacity(region.area());
        for y in region.y..region.bottom() {
            for x in region.x..region.right() {
                bins.push(field.direction_bin(x, y).map_or(UNDEFINED, |b| b.index() as u8));
            }
        }
        Ok(Self {
            width: region.width,
            height: region.height,
            bins,
        })
    }

    pub fn from_bins(width: usize, height: usize, bins: Vec<Option<DirectionBin>>) -> Result<Self> {
        if bins.len() != width * height {
            return Err(Error::param(format!(
                "{} direction bins for a {width}x{height} grid",
                bins.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bins: bins
                .into_iter()
                .map(|b| b.map_or(UNDEFINED, |b| b.index() as u8))
                .collect(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<DirectionBin> {
        let b = self.bins[y * self.width + x];
        (b != UNDEFINED).then(|| DirectionBin::new(b as usize).expect("stored bins are valid"))
    }

    pub fn defined_count(&self) -> usize {
        self.bins.iter().filter(|&&b| b != UNDEFINED).count()
    }
}

/// Agreement between a grid and a displaced grid over their overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchScore {
    /// Overlap pixels whose two bins are equal.
    pub score: u64,
    /// Overlap pixels of the base grid with a defined direction.
    pub base_defined: u64,
    /// Pixels defined in both grids, counted by the sum of their two bins.
    pub sum_histogram: [u64; MAX_BIN_SUM + 1],
}

impl MatchScore {
    /// `score / base_defined`, zero when nothing is defined.
    pub fn ratio(&self) -> f64 {
        if self.base_defined == 0 {
            0.0
        } else {
            self.score as f64 / self.base_defined as f64
        }
    }
}

/// Compares `base(x, y)` with `shifted(x + dx, y + dy)` wherever both exist.
pub fn matching_score(base: &DirectionGrid, shifted: &DirectionGrid, dx: usize, dy: usize) -> Result<MatchScore> {
    if base.width != shifted.width || base.height != shifted.height {
        return Err(Error::param(format!(
            "grids differ in size: {}x{} and {}x{}",
            base.width, base.height, shifted.width, shifted.height
        )));
    }
    if dx >= base.width || dy >= base.height {
        return Err(Error::EmptyOverlap {
            dx: dx as isize,
            dy: dy as isize,
        });
    }
    let (ow, oh) = (base.width - dx, base.height - dy);
    let mut out = MatchScore {
        score: 0,
        base_defined: 0,
        sum_histogram: [0; MAX_BIN_SUM + 1],
    };
    for y in 0..oh {
        let a_row = &base.bins[y * base.width..y * base.width + ow];
        let b_start = (y + dy) * base.width + dx;
        let b_row = &shifted.bins[b_start..b_start + ow];
        for (&a, &b) in a_row.iter().zip(b_row) {
            if a == UNDEFINED {
                continue;
            }
            out.base_defined += 1;
            if b == UNDEFINED {
                continue;
            }
            out.sum_histogram[a as usize + b as usize] += 1;
            if a == b {
                out.score += 1;
            }
        }
    }
    Ok(out)
}

/// Matching score of a grid against itself displaced by `(dx, dy)`.
pub fn self_matching_score(grid: &DirectionGrid, dx: usize, dy: usize) -> Result<MatchScore> {
    matching_score(grid, grid, dx, dy)
}

/// Recovered repeat lengths of a pattern with the agreement curves behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGeometry {
    /// `None` when no re-peak occurs within the sweep.
    pub period_width: Option<usize>,
    pub period_height: Option<usize>,
    /// Matching scores for horizontal shifts `0..=max_shift`.
    pub width_curve: Vec<u64>,
    pub height_curve: Vec<u64>,
}

/// Sweeps horizontal and vertical self-shifts up to `max_shift`.
///
/// The period along an axis is the smallest shift at which the agreement
/// ratio has a local maximum of at least [`PERIOD_PEAK_RATIO`] after first
/// falling below that level.
pub fn pattern_dimensions(grid: &DirectionGrid, max_shift: usize) -> Result<PatternGeometry> {
    if max_shift == 0 || max_shift >= grid.width.min(grid.height) {
        return Err(Error::param(format!(
            "max shift {max_shift} must be in 1..{}",
            grid.width.min(grid.height)
        )));
    }
    let sweep = |horizontal: bool| -> Result<Vec<MatchScore>> {
        (0..=max_shift)
            .into_par_iter()
            .map(|s| {
                if horizontal {
                    self_matching_score(grid, s, 0)
                } else {
                    self_matching_score(grid, 0, s)
                }
            })
            .collect()
    };
    let horiz = sweep(true)?;
    let vert = sweep(false)?;
    Ok(PatternGeometry {
        period_width: period_from_curve(&horiz),
        period_height: period_from_curve(&vert),
        width_curve: horiz.iter().map(|m| m.score).collect(),
        height_curve: vert.iter().map(|m| m.score).collect(),
    })
}

fn period_from_curve(curve: &[MatchScore]) -> Option<usize> {
    let r: Vec<f64> = curve.iter().map(MatchScore::ratio).collect();
    let mut dipped = false;
    for s in 1..r.len() {
        if r[s] < PERIOD_PEAK_RATIO {
            dipped = true;
            continue;
        }
        let rises = r[s] >= r[s - 1];
        let holds = s + 1 == r.len() || r[s] >= r[s + 1];
        if dipped && rises && holds {
            return Some(s);
        }
    }
    None
}
