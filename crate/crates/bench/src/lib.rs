//! Shared inputs for the benchmarks.

use blockwatch_core::frame::Rect;
use blockwatch_core::synth::{add_noise, inject_block_pattern, make_scene, PatternSpec};
use blockwatch_core::LumaFrame;

/// A smooth noisy scene of the given size.
pub fn scene(width: usize, height: usize) -> LumaFrame {
    let base = make_scene(width, height, 42).expect("valid scene size");
    add_noise(&base, 2, 42, 0).expect("valid noise amplitude")
}

/// The same scene with an 8-pixel block grid pressed into it.
pub fn blocky_scene(width: usize, height: usize) -> LumaFrame {
    let spec = PatternSpec::block_grid(width, height, 8, 0, 24.0);
    inject_block_pattern(&scene(width, height), &spec).expect("valid pattern")
}

pub fn full_frame(frame: &LumaFrame) -> Rect {
    Rect::new(0, 0, frame.width(), frame.height())
}
