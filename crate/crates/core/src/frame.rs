//! Luminance frames and rectangular regions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest frame side that still fits a 3x3 convolution window.
pub const MIN_FRAME_SIDE: usize = 3;

/// One 8-bit luminance plane in row-major order.
///
/// Frames are immutable once built, so they can be shared freely between
/// worker threads.
#[derive(Clone, PartialEq, Eq)]
pub struct LumaFrame {
    width: usize,
    height: usize,
    samples: Vec<u8>,
    frame_index: usize,
}

impl LumaFrame {
    pub fn new(width: usize, height: usize, samples: Vec<u8>, frame_index: usize) -> Result<Self> {
        if width < MIN_FRAME_SIDE || height < MIN_FRAME_SIDE {
            return Err(Error::InvalidFrame(format!(
                "{width}x{height} is smaller than the {MIN_FRAME_SIDE}x{MIN_FRAME_SIDE} minimum"
            )));
        }
        if samples.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "{} samples for a {width}x{height} frame",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
            frame_index,
        })
    }

    /// A frame with every sample set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height], 0)
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples, 0)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    #[inline]
    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    /// Sample at a possibly out-of-range coordinate, replicating the border.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.samples[cy * self.width + cx]
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    pub fn with_index(mut self, frame_index: usize) -> Self {
        self.frame_index = frame_index;
        self
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }

    /// Copies the pixels of `region` into a standalone block.
    pub fn crop(&self, region: Rect) -> Result<PixelBlock> {
        region.check_within(self.width, self.height)?;
        let mut data = Vec::with_capacity(region.width * region.height);
        for y in region.y..region.bottom() {
            data.extend_from_slice(&self.row(y)[region.x..region.right()]);
        }
        PixelBlock::new(region.height, region.width, data)
    }
}

impl fmt::Debug for LumaFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LumaFrame")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("frame_index", &self.frame_index)
            .finish_non_exhaustive()
    }
}

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self { x, y, width, height }
    }

    #[inline]
    pub fn right(&self) -> usize {
        self.x + self.width
    }

    #[inline]
    pub fn bottom(&self) -> usize {
        self.y + self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    pub(crate) fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.is_empty() || self.right() > width || self.bottom() > height {
            return Err(Error::RegionOutOfBounds {
                region: self.to_string(),
                width,
                height,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}+{}+{}", self.width, self.height, self.x, self.y)
    }
}

/// A small standalone grid of 8-bit samples, `rows` x `cols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelBlock {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl PixelBlock {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidFrame(format!(
                "{} samples for a {rows}x{cols} block",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: u8) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.cols + col]
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }
}
