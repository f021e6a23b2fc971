//! Directional edge gradients.
//!
//! Kirsch compass responses drive the blockiness metric; Sobel components and
//! their 60-way phase quantization drive spatial error block analysis. Both
//! operators replicate border pixels, so output geometry equals the input.

use rayon::prelude::*;

use crate::frame::LumaFrame;

/// Number of quantized gradient directions, each spanning 6 degrees.
pub const DIRECTION_BINS: usize = 60;
/// Angular width of one direction bin in degrees.
pub const BIN_DEGREES: f64 = 6.0;

/// Clockwise 3x3 ring starting at the top-left neighbour, as (row, col).
const RING: [(usize, usize); 8] = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0)];

/// The eight Kirsch compass masks. Mask `k` (1-based) carries +5 on ring
/// positions `k-1 ..= k+1` and -3 on the rest, so successive masks are 45
/// degree clockwise rotations of the north mask.
pub fn kirsch_masks() -> [[[i32; 3]; 3]; 8] {
    let mut masks = [[[-3i32; 3]; 3]; 8];
    for (k, mask) in masks.iter_mut().enumerate() {
        mask[1][1] = 0;
        for t in 0..3 {
            let (r, c) = RING[(k + t) % 8];
            mask[r][c] = 5;
        }
    }
    masks
}

/// Per-pixel maximum Kirsch magnitude and the 1-based index of the mask
/// that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientField {
    width: usize,
    height: usize,
    magnitude: Vec<u32>,
    direction: Vec<u8>,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn magnitude(&self, x: usize, y: usize) -> u32 {
        self.magnitude[y * self.width + x]
    }

    /// Winning mask index in `1..=8`.
    #[inline]
    pub fn direction(&self, x: usize, y: usize) -> u8 {
        self.direction[y * self.width + x]
    }

    pub fn magnitudes(&self) -> &[u32] {
        &self.magnitude
    }

    pub fn directions(&self) -> &[u8] {
        &self.direction
    }

    pub fn magnitude_row(&self, y: usize) -> &[u32] {
        &self.magnitude[y * self.width..(y + 1) * self.width]
    }

    /// Builds a field from explicit per-pixel magnitudes (direction 1 everywhere).
    pub fn from_magnitudes(width: usize, height: usize, magnitude: Vec<u32>) -> Self {
        assert_eq!(magnitude.len(), width * height, "magnitude buffer size");
        Self {
            width,
            height,
            direction: vec![1; magnitude.len()],
            magnitude,
        }
    }
}

#[inline]
fn ring_at(frame: &LumaFrame, x: usize, y: usize) -> [i32; 8] {
    let mut ring = [0i32; 8];
    for (slot, &(r, c)) in ring.iter_mut().zip(RING.iter()) {
        *slot = frame.get_clamped(x as isize + c as isize - 1, y as isize + r as isize - 1) as i32;
    }
    ring
}

/// Kirsch compass gradient of every pixel. Ties resolve to the lowest mask index.
pub fn kirsch_gradient(frame: &LumaFrame) -> GradientField {
    let (w, h) = (frame.width(), frame.height());
    let mut magnitude = vec![0u32; w * h];
    let mut direction = vec![0u8; w * h];
    magnitude
        .par_chunks_mut(w)
        .zip(direction.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (mag_row, dir_row))| {
            for x in 0..w {
                let ring = ring_at(frame, x, y);
                let total: i32 = ring.iter().sum();
                // grad_k = 5*T_k - 3*(total - T_k) = 8*T_k - 3*total,
                // where T_k sums the three ring samples under the +5 weights.
                let mut best = 0u32;
                let mut best_k = 1u8;
                for k in 0..8 {
                    let t = ring[k] + ring[(k + 1) % 8] + ring[(k + 2) % 8];
                    let g = (8 * t - 3 * total).unsigned_abs();
                    if g > best {
                        best = g;
                        best_k = k as u8 + 1;
                    }
                }
                mag_row[x] = best;
                dir_row[x] = best_k;
            }
        });
    GradientField {
        width: w,
        height: h,
        magnitude,
        direction,
    }
}

/// Signed Sobel components. Magnitude and phase are derived on demand.
///
/// `S_x` uses the kernel `[-1 0 1; -2 0 2; -1 0 1]` and `S_y` its transpose,
/// so with rows counted downward an intensity ramp increasing with `y` has
/// phase 90 degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SobelField {
    width: usize,
    height: usize,
    sx: Vec<i32>,
    sy: Vec<i32>,
}

impl SobelField {
    pub fn from_components(width: usize, height: usize, sx: Vec<i32>, sy: Vec<i32>) -> Self {
        assert_eq!(sx.len(), width * height, "sx buffer size");
        assert_eq!(sy.len(), width * height, "sy buffer size");
        Self { width, height, sx, sy }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn sx(&self, x: usize, y: usize) -> i32 {
        self.sx[y * self.width + x]
    }

    #[inline]
    pub fn sy(&self, x: usize, y: usize) -> i32 {
        self.sy[y * self.width + x]
    }

    pub fn sx_values(&self) -> &[i32] {
        &self.sx
    }

    pub fn sy_values(&self) -> &[i32] {
        &self.sy
    }

    /// `sqrt(S_x^2 + S_y^2)`.
    #[inline]
    pub fn magnitude(&self, x: usize, y: usize) -> f64 {
        component_magnitude(self.sx(x, y), self.sy(x, y))
    }

    /// Phase in degrees within `[0, 360)`, or `None` where both components vanish.
    #[inline]
    pub fn phase(&self, x: usize, y: usize) -> Option<f64> {
        component_phase(self.sx(x, y), self.sy(x, y))
    }

    #[inline]
    pub fn direction_bin(&self, x: usize, y: usize) -> Option<DirectionBin> {
        DirectionBin::from_components(self.sx(x, y), self.sy(x, y))
    }
}

#[inline]
pub fn component_magnitude(sx: i32, sy: i32) -> f64 {
    let (sx, sy) = (sx as f64, sy as f64);
    (sx * sx + sy * sy).sqrt()
}

#[inline]
pub fn component_phase(sx: i32, sy: i32) -> Option<f64> {
    if sx == 0 && sy == 0 {
        return None;
    }
    let mut deg = (sy as f64).atan2(sx as f64).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    if deg >= 360.0 {
        deg = 0.0;
    }
    Some(deg)
}

/// Sobel components of every pixel.
pub fn sobel_gradient(frame: &LumaFrame) -> SobelField {
    let (w, h) = (frame.width(), frame.height());
    let mut sx = vec![0i32; w * h];
    let mut sy = vec![0i32; w * h];
    sx.par_chunks_mut(w)
        .zip(sy.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (sx_row, sy_row))| {
            let yi = y as isize;
            for x in 0..w {
                let xi = x as isize;
                let p = |dx: isize, dy: isize| frame.get_clamped(xi + dx, yi + dy) as i32;
                let (tl, tc, tr) = (p(-1, -1), p(0, -1), p(1, -1));
                let (ml, mr) = (p(-1, 0), p(1, 0));
                let (bl, bc, br) = (p(-1, 1), p(0, 1), p(1, 1));
                sx_row[x] = (tr + 2 * mr + br) - (tl + 2 * ml + bl);
                sy_row[x] = (bl + 2 * bc + br) - (tl + 2 * tc + tr);
            }
        });
    SobelField {
        width: w,
        height: h,
        sx,
        sy,
    }
}

/// One of the sixty 6-degree direction sectors, `D_0 ..= D_59`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectionBin(u8);

impl DirectionBin {
    pub fn new(index: usize) -> Option<Self> {
        (index < DIRECTION_BINS).then_some(Self(index as u8))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// `floor(phase / 6) mod 60`; `None` for a non-finite phase.
    #[inline]
    pub fn from_phase(phase_degrees: f64) -> Option<Self> {
        if !phase_degrees.is_finite() {
            return None;
        }
        let bin = (phase_degrees.rem_euclid(360.0) / BIN_DEGREES).floor() as usize % DIRECTION_BINS;
        Some(Self(bin as u8))
    }

    #[inline]
    pub fn from_components(sx: i32, sy: i32) -> Option<Self> {
        component_phase(sx, sy).and_then(Self::from_phase)
    }

    /// Lower edge of the sector in degrees.
    pub fn start_degrees(self) -> f64 {
        self.0 as f64 * BIN_DEGREES
    }
}

/// Quantizes a gradient phase into its 6-degree sector.
pub fn quantize_direction(phase_degrees: f64) -> Option<DirectionBin> {
    DirectionBin::from_phase(phase_degrees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(w: usize, h: usize, f: impl FnMut(usize, usize) -> u8) -> LumaFrame {
        LumaFrame::from_fn(w, h, f).unwrap()
    }

    #[test]
    fn masks_are_zero_sum_rotations() {
        let masks = kirsch_masks();
        assert_eq!(masks[0], [[5, 5, 5], [-3, 0, -3], [-3, -3, -3]]);
        assert_eq!(masks[2], [[-3, -3, 5], [-3, 0, 5], [-3, -3, 5]]);
        for m in &masks {
            assert_eq!(m.iter().flatten().sum::<i32>(), 0);
        }
    }

    #[test]
    fn constant_frame_has_no_gradient() {
        let f = LumaFrame::filled(9, 7, 128).unwrap();
        let g = kirsch_gradient(&f);
        assert!(g.magnitudes().iter().all(|&m| m == 0));
        assert!(g.directions().iter().all(|&d| d == 1));
        let s = sobel_gradient(&f);
        assert!(s.sx_values().iter().chain(s.sy_values()).all(|&v| v == 0));
        assert_eq!(s.phase(4, 3), None);
    }

    #[test]
    fn step_edge_responds_on_both_sides() {
        let f = frame(8, 8, |x, _| if x < 4 { 0 } else { 255 });
        let g = kirsch_gradient(&f);
        for y in 0..8 {
            assert_eq!(g.magnitude(3, y), 15 * 255);
            assert_eq!(g.magnitude(4, y), 15 * 255);
            assert_eq!(g.magnitude(1, y), 0);
        }
    }

    #[test]
    fn ramps_have_axis_phases() {
        let h = frame(8, 8, |x, _| (x * 10) as u8);
        let s = sobel_gradient(&h);
        for y in 1..7 {
            for x in 1..7 {
                assert_eq!(s.sy(x, y), 0);
                assert_eq!(s.phase(x, y), Some(0.0));
            }
        }
        let v = frame(8, 8, |_, y| (y * 10) as u8);
        let s = sobel_gradient(&v);
        assert_eq!(s.sx(3, 3), 0);
        assert_eq!(s.phase(3, 3), Some(90.0));
    }

    #[test]
    fn quantization_examples() {
        assert_eq!(quantize_direction(0.0).unwrap().index(), 0);
        assert_eq!(quantize_direction(89.0).unwrap().index(), 14);
        assert_eq!(quantize_direction(359.9).unwrap().index(), 59);
        assert_eq!(quantize_direction(f64::NAN), None);
        assert_eq!(DirectionBin::from_components(0, 0), None);
    }

    #[test]
    fn rotation_shifts_kirsch_direction_by_two() {
        let f = frame(9, 9, |x, y| ((x * 37 + y * 91 + x * y * 13) % 251) as u8);
        // 90 degree clockwise rotation: new(x, y) = old(y, n - 1 - x).
        let n = 9;
        let r = frame(n, n, |x, y| f.get(y, n - 1 - x));
        let (gf, gr) = (kirsch_gradient(&f), kirsch_gradient(&r));
        for y in 1..n - 1 {
            for x in 1..n - 1 {
                let (ox, oy) = (y, n - 1 - x);
                assert_eq!(gr.magnitude(x, y), gf.magnitude(ox, oy));
                // Ties can pick different masks; compare only unique winners.
                let d = gf.direction(ox, oy) as usize - 1;
                let expected = (d + 2) % 8 + 1;
                let masks = kirsch_masks();
                let winners = (0..8)
                    .filter(|&k| {
                        let mut acc = 0i32;
                        for (i, row) in masks[k].iter().enumerate() {
                            for (j, w) in row.iter().enumerate() {
                                acc += w * f.get(ox + j - 1, oy + i - 1) as i32;
                            }
                        }
                        acc.unsigned_abs() == gf.magnitude(ox, oy)
                    })
                    .count();
                if winners == 1 {
                    assert_eq!(gr.direction(x, y) as usize, expected);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn offset_invariance(data in proptest::collection::vec(0u8..200, 36), c in 0u8..55) {
            let a = LumaFrame::new(6, 6, data.clone(), 0).unwrap();
            let b = LumaFrame::new(6, 6, data.iter().map(|&v| v + c).collect(), 0).unwrap();
            prop_assert_eq!(kirsch_gradient(&a), kirsch_gradient(&b));
            prop_assert_eq!(sobel_gradient(&a), sobel_gradient(&b));
        }

        #[test]
        fn scaling_scales_magnitude(data in proptest::collection::vec(0u8..=85, 25)) {
            let a = LumaFrame::new(5, 5, data.clone(), 0).unwrap();
            let b = LumaFrame::new(5, 5, data.iter().map(|&v| v * 3).collect(), 0).unwrap();
            let (ga, gb) = (kirsch_gradient(&a), kirsch_gradient(&b));
            for (ma, mb) in ga.magnitudes().iter().zip(gb.magnitudes()) {
                prop_assert_eq!(ma * 3, *mb);
            }
        }

        #[test]
        fn every_bin_spans_six_degrees(phase in 0.0f64..360.0) {
            let bin = quantize_direction(phase).unwrap();
            prop_assert!(bin.start_degrees() <= phase && phase < bin.start_degrees() + 6.0);
        }
    }
}
