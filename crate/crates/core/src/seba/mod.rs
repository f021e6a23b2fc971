//! Spatial error block analysis.
//!
//! Regions are classified as uniform, edge or texture from per-direction
//! Sobel strengths. Flat missing blocks can be estimated from their
//! neighbours. Repetitive error patterns get an orientation from a folded
//! direction histogram and a period from shifted self-matching.

mod ems;
mod estimate;
mod histogram;
mod pattern;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{LumaFrame, Rect};
use crate::frame_io::BlockSummary;
use crate::gradient::{sobel_gradient, SobelField};
use crate::numfmt;

pub use ems::{accumulate_ems, accumulate_ems_regions, classify_block, gdv_table, BlockClass, EmsTable, GdvTable};
pub use estimate::{estimate_uniform_block, EstimatedBlock, UniformNeighbors};
pub use histogram::{
    reduce_bins, rotation_offset, rotation_scores, BinMask, DirectionHistogram, PatternOrientation, RotationMask,
    AXIS_BINS, QUADRANT_BINS,
};
pub use pattern::{
    matching_score, pattern_dimensions, self_matching_score, DirectionGrid, MatchScore, PatternGeometry, MAX_BIN_SUM,
    PERIOD_PEAK_RATIO,
};

pub const DEFAULT_TH_FIX: f64 = 0.2;
pub const DEFAULT_TEXTURE_COUNT: usize = 4;
pub const DEFAULT_EMS_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SebaConfig {
    /// Fraction of the strongest bin's strength by which a bin may fall
    /// short and still count as dominant.
    #[serde(with = "numfmt::six")]
    pub th_fix: f64,
    /// Dominant bins needed for a texture label.
    pub texture_count: usize,
    /// Strength a bin must exceed to be dominant at all.
    #[serde(with = "numfmt::six")]
    pub ems_floor: f64,
    /// Square tile side; the whole frame is one region when unset.
    #[serde(default)]
    pub block_size: Option<usize>,
    /// Longest shift tried when looking for pattern periods; half the
    /// smaller region side when unset.
    #[serde(default)]
    pub max_shift: Option<usize>,
    #[serde(default)]
    pub rotation_mask: RotationMask,
}

impl Default for SebaConfig {
    fn default() -> Self {
        Self {
            th_fix: DEFAULT_TH_FIX,
            texture_count: DEFAULT_TEXTURE_COUNT,
            ems_floor: DEFAULT_EMS_FLOOR,
            block_size: None,
            max_shift: None,
            rotation_mask: RotationMask::default(),
        }
    }
}

impl SebaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.th_fix) {
            return Err(Error::param(format!("th_fix {} must be in [0, 1)", self.th_fix)));
        }
        if self.texture_count < 2 {
            return Err(Error::param(format!(
                "texture count {} must be at least 2",
                self.texture_count
            )));
        }
        if !(self.ems_floor.is_finite() && self.ems_floor >= 0.0) {
            return Err(Error::param(format!(
                "EMS floor {} must be non-negative",
                self.ems_floor
            )));
        }
        if let Some(b) = self.block_size {
            if b < 4 {
                return Err(Error::param(format!("block size {b} must be at least 4")));
            }
        }
        if self.max_shift == Some(0) {
            return Err(Error::param("max shift must be positive"));
        }
        self.rotation_mask.validate()
    }
}

/// Position of a block relative to a missing block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockRole {
    Missing,
    Up,
    Down,
    Left,
    Right,
    UpLeft,
    UpRight,
    DownLeft,
    DownRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRegion {
    pub rect: Rect,
    pub role: BlockRole,
}

/// Same-sized blocks around `missing` that lie fully inside the frame.
pub fn neighbor_regions(missing: Rect, width: usize, height: usize) -> Result<Vec<BlockRegion>> {
    missing.check_within(width, height)?;
    if missing.width < 2 || missing.height < 2 {
        return Err(Error::param(format!("block {missing} is smaller than 2x2")));
    }
    use BlockRole::*;
    let (w, h) = (missing.width as isize, missing.height as isize);
    let offsets = [
        (Up, 0, -1),
        (Down, 0, 1),
        (Left, -1, 0),
        (Right, 1, 0),
        (UpLeft, -1, -1),
        (UpRight, 1, -1),
        (DownLeft, -1, 1),
        (DownRight, 1, 1),
    ];
    let mut out = Vec::new();
    for (role, ox, oy) in offsets {
        let x = missing.x as isize + ox * w;
        let y = missing.y as isize + oy * h;
        if x < 0 || y < 0 || x + w > width as isize || y + h > height as isize {
            continue;
        }
        out.push(BlockRegion {
            rect: Rect::new(x as usize, y as usize, missing.width, missing.height),
            role,
        });
    }
    Ok(out)
}

/// Neighbour blocks of `missing`, cropped from `frame`, ready for estimation.
pub fn gather_neighbors(frame: &LumaFrame, missing: Rect) -> Result<UniformNeighbors> {
    let mut n = UniformNeighbors::default();
    for region in neighbor_regions(missing, frame.width(), frame.height())? {
        let block = Some(frame.crop(region.rect)?);
        match region.role {
            BlockRole::Up => n.up = block,
            BlockRole::Down => n.down = block,
            BlockRole::Left => n.left = block,
            BlockRole::Right => n.right = block,
            BlockRole::UpLeft => n.up_left = block,
            BlockRole::UpRight => n.up_right = block,
            BlockRole::DownLeft => n.down_left = block,
            BlockRole::DownRight => n.down_right = block,
            BlockRole::Missing => {}
        }
    }
    Ok(n)
}

/// Classifies a damaged block from the ring of blocks around it.
pub fn classify_error_block(field: &SobelField, missing: Rect, cfg: &SebaConfig) -> Result<BlockClass> {
    let rects: Vec<Rect> = neighbor_regions(missing, field.width(), field.height())?
        .into_iter()
        .map(|r| r.rect)
        .collect();
    if rects.is_empty() {
        return Err(Error::NoNeighbors);
    }
    let ems = accumulate_ems_regions(field, &rects)?;
    let mut hist = DirectionHistogram::default();
    for r in &rects {
        hist.merge(&DirectionHistogram::accumulate(field, *r)?);
    }
    Ok(classify_block(&ems, &hist, cfg))
}

/// Class, orientation and periods of one region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionAnalysis {
    pub region: Rect,
    pub class: BlockClass,
    pub histogram: DirectionHistogram,
    pub orientation: Option<PatternOrientation>,
    pub geometry: Option<PatternGeometry>,
}

/// Full analysis of a single region of a precomputed Sobel field.
///
/// Orientation is reported for edge and texture regions; periods only for
/// texture regions large enough to shift.
pub fn analyze_region(field: &SobelField, region: Rect, cfg: &SebaConfig) -> Result<RegionAnalysis> {
    let ems = accumulate_ems(field, region)?;
    let histogram = DirectionHistogram::accumulate(field, region)?;
    let class = classify_block(&ems, &histogram, cfg);
    let orientation = match class {
        BlockClass::Uniform => None,
        _ => rotation_offset(&histogram, &cfg.rotation_mask),
    };
    let side = region.width.min(region.height);
    let geometry = if class == BlockClass::Texture && side >= 2 {
        let max_shift = cfg.max_shift.unwrap_or(side / 2).min(side - 1);
        let grid = DirectionGrid::from_field(field, region)?;
        Some(pattern_dimensions(&grid, max_shift)?)
    } else {
        None
    };
    Ok(RegionAnalysis {
        region,
        class,
        histogram,
        orientation,
        geometry,
    })
}

/// Regions analysed for a frame of the given size.
pub fn analysis_regions(width: usize, height: usize, cfg: &SebaConfig) -> Vec<Rect> {
    match cfg.block_size {
        None => vec![Rect::new(0, 0, width, height)],
        Some(b) => {
            let mut out = Vec::new();
            for y in (0..height / b).map(|r| r * b) {
                for x in (0..width / b).map(|c| c * b) {
                    out.push(Rect::new(x, y, b, b));
                }
            }
            out
        }
    }
}

/// Analyses every region of `frame` and returns one summary per region,
/// in raster order.
pub fn analyze_frame(frame: &LumaFrame, cfg: &SebaConfig) -> Result<Vec<RegionAnalysis>> {
    cfg.validate()?;
    let field = sobel_gradient(frame);
    analysis_regions(frame.width(), frame.height(), cfg)
        .into_par_iter()
        .map(|r| analyze_region(&field, r, cfg))
        .collect()
}

impl RegionAnalysis {
    pub fn summary(&self, frame_index: usize) -> BlockSummary {
        BlockSummary {
            frame_index,
            x: self.region.x,
            y: self.region.y,
            width: self.region.width,
            height: self.region.height,
            class: self.class,
            high_bin: self.orientation.map(|o| o.high_bin),
            orientation_degrees: self.orientation.map(|o| o.offset_degrees),
            period_height: self.geometry.as_ref().and_then(|g| g.period_height),
            period_width: self.geometry.as_ref().and_then(|g| g.period_width),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_is_clipped_at_borders() {
        let roles = |r: Rect| -> Vec<BlockRole> {
            neighbor_regions(r, 48, 48)
                .unwrap()
                .into_iter()
                .map(|b| b.role)
                .collect()
        };
        assert_eq!(roles(Rect::new(16, 16, 16, 16)).len(), 8);
        assert_eq!(
            roles(Rect::new(0, 0, 16, 16)),
            vec![BlockRole::Down, BlockRole::Right, BlockRole::DownRight]
        );
        for b in neighbor_regions(Rect::new(16, 16, 16, 16), 48, 48).unwrap() {
            assert!(!b.rect.intersects(&Rect::new(16, 16, 16, 16)));
        }
        assert!(neighbor_regions(Rect::new(40, 40, 16, 16), 48, 48).is_err());
    }

    #[test]
    fn estimate_from_frame() {
        let frame = LumaFrame::from_fn(12, 12, |x, y| match (x / 4, y / 4) {
            (1, 0) => 100,
            (1, 2) => 200,
            (0, 1) => 100,
            (2, 1) => 200,
            _ => 0,
        })
        .unwrap();
        let n = gather_neighbors(&frame, Rect::new(4, 4, 4, 4)).unwrap();
        let e = estimate_uniform_block(&n, 4, 4).unwrap();
        assert_eq!((e.get(0, 0), e.get(0, 3), e.get(3, 3)), (100.0, 150.0, 200.0));
    }

    #[test]
    fn error_block_uses_ring() {
        let frame = LumaFrame::from_fn(24, 24, |x, _| if x < 12 { 50 } else { 180 }).unwrap();
        let field = sobel_gradient(&frame);
        let class = classify_error_block(&field, Rect::new(8, 8, 8, 8), &SebaConfig::default()).unwrap();
        assert_eq!(class, BlockClass::Edge);
    }

    #[test]
    fn tiles_in_raster_order() {
        let cfg = SebaConfig {
            block_size: Some(8),
            ..Default::default()
        };
        let regions = analysis_regions(20, 17, &cfg);
        assert_eq!(
            regions,
            vec![
                Rect::new(0, 0, 8, 8),
                Rect::new(8, 0, 8, 8),
                Rect::new(0, 8, 8, 8),
                Rect::new(8, 8, 8, 8)
            ]
        );
    }

    #[test]
    fn texture_frame_summary() {
        let frame = LumaFrame::from_fn(64, 64, |x, y| if (x % 16 < 8) ^ (y % 16 < 8) { 30 } else { 220 }).unwrap();
        let res = analyze_frame(&frame, &SebaConfig::default()).unwrap();
        let s = res[0].summary(3);
        assert_eq!(s.class, BlockClass::Texture);
        assert_eq!((s.period_width, s.period_height), (Some(16), Some(16)));
        assert_eq!(s.frame_index, 3);
    }

    #[test]
    fn config_limits() {
        let bad = [
            SebaConfig {
                th_fix: 1.0,
                ..Default::default()
            },
            SebaConfig {
                texture_count: 1,
                ..Default::default()
            },
            SebaConfig {
                ems_floor: -1.0,
                ..Default::default()
            },
            SebaConfig {
                block_size: Some(2),
                ..Default::default()
            },
            SebaConfig {
                max_shift: Some(0),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
        assert!(SebaConfig::default().validate().is_ok());
    }
}
