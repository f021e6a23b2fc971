use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frame::Rect;
use crate::gradient::{SobelField, DIRECTION_BINS};

use super::histogram::DirectionHistogram;
use super::SebaConfig;

/// Sobel component sums per direction bin with the derived strength.
#[derive(Debug, Clone, PartialEq)]
pub struct EmsTable {
    ems_x: [i64; DIRECTION_BINS],
    ems_y: [i64; DIRECTION_BINS],
    ems: [f64; DIRECTION_BINS],
}

impl EmsTable {
    pub fn from_sums(ems_x: [i64; DIRECTION_BINS], ems_y: [i64; DIRECTION_BINS]) -> Self {
        let mut ems = [0.0; DIRECTION_BINS];
        for k in 0..DIRECTION_BINS {
            ems[k] = (ems_x[k] as f64).hypot(ems_y[k] as f64);
        }
        Self { ems_x, ems_y, ems }
    }

    pub fn ems_x(&self, bin: usize) -> i64 {
        self.ems_x[bin]
    }

    pub fn ems_y(&self, bin: usize) -> i64 {
        self.ems_y[bin]
    }

    pub fn ems(&self, bin: usize) -> f64 {
        self.ems[bin]
    }

    pub fn strengths(&self) -> &[f64; DIRECTION_BINS] {
        &self.ems
    }

    /// `EMS_dom`, the largest strength over all bins.
    pub fn dominant_strength(&self) -> f64 {
        self.ems.iter().copied().fold(0.0, f64::max)
    }

    fn merge(&mut self, other: &EmsTable) {
        for k in 0..DIRECTION_BINS {
            self.ems_x[k] += other.ems_x[k];
            self.ems_y[k] += other.ems_y[k];
        }
        *self = Self::from_sums(self.ems_x, self.ems_y);
    }
}

/// Sums `S_x` and `S_y` of every direction-defined pixel of `region` into its bin.
pub fn accumulate_ems(field: &SobelField, region: Rect) -> Result<EmsTable> {
    region.check_within(field.width(), field.height())?;
    let mut ex = [0i64; DIRECTION_BINS];
    let mut ey = [0i64; DIRECTION_BINS];
    for y in region.y..region.bottom() {
        for x in region.x..region.right() {
            let (sx, sy) = (field.sx(x, y), field.sy(x, y));
            if let Some(bin) = field.direction_bin(x, y) {
                ex[bin.index()] += sx as i64;
                ey[bin.index()] += sy as i64;
            }
        }
    }
    Ok(EmsTable::from_sums(ex, ey))
}

/// Accumulates several regions into one table.
pub fn accumulate_ems_regions(field: &SobelField, regions: &[Rect]) -> Result<EmsTable> {
    let mut table = EmsTable::from_sums([0; DIRECTION_BINS], [0; DIRECTION_BINS]);
    for r in regions {
        table.merge(&accumulate_ems(field, *r)?);
    }
    Ok(table)
}

/// Refined orientation per bin and which bins count as dominant.
#[derive(Debug, Clone, PartialEq)]
pub struct GdvTable {
    gdv: [Option<f64>; DIRECTION_BINS],
    dominant: [bool; DIRECTION_BINS],
    threshold: f64,
}

impl GdvTable {
    /// `atan2(EMS_y, EMS_x)` in degrees, `None` where the bin is empty.
    pub fn gdv(&self, bin: usize) -> Option<f64> {
        self.gdv[bin]
    }

    pub fn is_dominant(&self, bin: usize) -> bool {
        self.dominant[bin]
    }

    pub fn dominant_bins(&self) -> Vec<usize> {
        (0..DIRECTION_BINS).filter(|&k| self.dominant[k]).collect()
    }

    pub fn dominant_count(&self) -> usize {
        self.dominant.iter().filter(|&&d| d).count()
    }

    /// `Th_Ems`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

/// Marks bins whose strength reaches `EMS_dom · (1 − th_fix)` and exceeds `floor`.
pub fn gdv_table(ems: &EmsTable, th_fix: f64, floor: f64) -> GdvTable {
    let dom = ems.dominant_strength();
    let threshold = dom - th_fix * dom;
    let mut gdv = [None; DIRECTION_BINS];
    let mut dominant = [false; DIRECTION_BINS];
    for k in 0..DIRECTION_BINS {
        let e = ems.ems(k);
        if e > 0.0 {
            gdv[k] = Some((ems.ems_y(k) as f64).atan2(ems.ems_x(k) as f64).to_degrees());
        }
        dominant[k] = e > floor && e >= threshold;
    }
    GdvTable {
        gdv,
        dominant,
        threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockClass {
    Uniform,
    Edge,
    Texture,
}

impl BlockClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockClass::Uniform => "uniform",
            BlockClass::Edge => "edge",
            BlockClass::Texture => "texture",
        }
    }
}

/// Uniform when nothing is dominant, texture when at least
/// `cfg.texture_count` bins are, edge otherwise.
pub fn classify_block(ems: &EmsTable, hist: &DirectionHistogram, cfg: &SebaConfig) -> BlockClass {
    if hist.total() == 0 {
        return BlockClass::Uniform;
    }
    let count = gdv_table(ems, cfg.th_fix, cfg.ems_floor).dominant_count();
    match count {
        0 => BlockClass::Uniform,
        c if c < cfg.texture_count => BlockClass::Edge,
        _ => BlockClass::Texture,
    }
}
