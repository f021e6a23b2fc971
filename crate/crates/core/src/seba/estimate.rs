use crate::error::{Error, Result};
use crate::frame::PixelBlock;

/// Blocks surrounding a missing block; any of them may be unavailable.
///
/// `up`, `down`, `left` and `right` share the missing block's size, as do
/// the diagonal blocks when present.
#[derive(Debug, Clone, Default)]
pub struct UniformNeighbors {
    pub up: Option<PixelBlock>,
    pub down: Option<PixelBlock>,
    pub left: Option<PixelBlock>,
    pub right: Option<PixelBlock>,
    pub up_left: Option<PixelBlock>,
    pub up_right: Option<PixelBlock>,
    pub down_left: Option<PixelBlock>,
    pub down_right: Option<PixelBlock>,
}

impl UniformNeighbors {
    pub fn lateral(up: PixelBlock, down: PixelBlock, left: PixelBlock, right: PixelBlock) -> Self {
        Self {
            up: Some(up),
            down: Some(down),
            left: Some(left),
            right: Some(right),
            ..Default::default()
        }
    }
}

/// Estimated samples of a missing block, row-major, in half-unit precision.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedBlock {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl EstimatedBlock {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Rounded to the nearest sample value, halves away from zero.
    pub fn to_block(&self) -> PixelBlock {
        let data = self.data.iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
        PixelBlock::new(self.rows, self.cols, data).expect("estimate geometry is valid")
    }
}

/// Fill values for a flat missing block of `rows × cols` samples.
///
/// The top/bottom imitation copies the upper half from the block above
/// and the lower half from the block below; the left/right imitation does
/// the same column-wise with the side blocks. The estimate is their mean.
/// With an odd size the first half gets the extra row or column.
///
/// A missing side block is replaced by the diagonal blocks on that side
/// (upper one for the top half, lower one for the bottom half). An
/// imitation with only one source left uses it for both halves; an
/// imitation with no source is dropped.
pub fn estimate_uniform_block(neighbors: &UniformNeighbors, rows: usize, cols: usize) -> Result<EstimatedBlock> {
    if rows < 2 || cols < 2 {
        return Err(Error::param(format!("block {rows}x{cols} is smaller than 2x2")));
    }
    let all = [
        &neighbors.up,
        &neighbors.down,
        &neighbors.left,
        &neighbors.right,
        &neighbors.up_left,
        &neighbors.up_right,
        &neighbors.down_left,
        &neighbors.down_right,
    ];
    for b in all.into_iter().flatten() {
        if b.rows() != rows || b.cols() != cols {
            return Err(Error::param(format!(
                "neighbour block {}x{} does not match {rows}x{cols}",
                b.rows(),
                b.cols()
            )));
        }
    }

    let split_r = rows.div_ceil(2);
    let split_c = cols.div_ceil(2);

    let top_bottom = pair(neighbors.up.as_ref(), neighbors.down.as_ref());
    let left = side_source(&neighbors.left, &neighbors.up_left, &neighbors.down_left, split_r);
    let right = side_source(&neighbors.right, &neighbors.up_right, &neighbors.down_right, split_r);
    let left_right = pair(left, right);

    if top_bottom.is_none() && left_right.is_none() {
        return Err(Error::NoNeighbors);
    }

    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let tb = top_bottom.map(|(first, second)| if i < split_r { first } else { second }.sample(i, j));
            let lr = left_right.map(|(first, second)| if j < split_c { first } else { second }.sample(i, j));
            let v = match (tb, lr) {
                (Some(a), Some(b)) => (a as f64 + b as f64) / 2.0,
                (Some(a), None) | (None, Some(a)) => a as f64,
                (None, None) => unreachable!(),
            };
            data.push(v);
        }
    }
    Ok(EstimatedBlock { rows, cols, data })
}

fn side_source<'a>(
    main: &'a Option<PixelBlock>,
    upper: &'a Option<PixelBlock>,
    lower: &'a Option<PixelBlock>,
    split: usize,
) -> Option<Source<'a>> {
    if let Some(b) = main {
        return Some(Source::Whole(b));
    }
    match (upper.as_ref(), lower.as_ref()) {
        (Some(u), Some(l)) => Some(Source::Split(u, l, split)),
        (Some(b), None) | (None, Some(b)) => Some(Source::Whole(b)),
        (None, None) => None,
    }
}

#[derive(Clone, Copy)]
enum Source<'a> {
    Whole(&'a PixelBlock),
    /// Upper rows from the first block, the rest from the second.
    Split(&'a PixelBlock, &'a PixelBlock, usize),
}

impl Source<'_> {
    fn sample(self, row: usize, col: usize) -> u8 {
        match self {
            Source::Whole(b) => b.get(row, col),
            Source::Split(u, l, at) => {
                if row < at {
                    u.get(row, col)
                } else {
                    l.get(row, col)
                }
            }
        }
    }
}

impl<'a> From<&'a PixelBlock> for Source<'a> {
    fn from(b: &'a PixelBlock) -> Self {
        Source::Whole(b)
    }
}

fn pair<'a, S: Into<Source<'a>>>(first: Option<S>, second: Option<S>) -> Option<(Source<'a>, Source<'a>)> {
    match (first.map(Into::into), second.map(Into::into)) {
        (Some(a), Some(b)) => Some((a, b)),
        (Some(a), None) | (None, Some(a)) => Some((a, a)),
        (None, None) => None,
    }
}
