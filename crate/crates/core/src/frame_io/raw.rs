use std::io::Read;

use super::PixelLayout;
use crate::error::{Error, Result};
use crate::frame::LumaFrame;

/// Headerless planar YUV reader; chroma planes are read and dropped.
pub struct RawReader<R> {
    inner: R,
    width: usize,
    height: usize,
    stride: usize,
    next_index: usize,
    buf: Vec<u8>,
    done: bool,
}

impl<R: Read> RawReader<R> {
    /// `total_len`, when known, is checked against the frame stride up front.
    pub fn new(inner: R, total_len: Option<u64>, width: usize, height: usize, layout: PixelLayout) -> Result<Self> {
        if width < crate::frame::MIN_FRAME_SIDE || height < crate::frame::MIN_FRAME_SIDE {
            return Err(Error::param(format!("raw geometry {width}x{height} is too small")));
        }
        let stride = layout.frame_stride(width, height);
        if let Some(len) = total_len {
            if len % stride as u64 != 0 {
                return Err(Error::GeometryMismatch {
                    len,
                    stride: stride as u64,
                });
            }
        }
        Ok(Self {
            inner,
            width,
            height,
            stride,
            next_index: 0,
            buf: vec![0; stride],
            done: false,
        })
    }

    fn read_frame(&mut self) -> Result<Option<LumaFrame>> {
        let mut filled = 0;
        while filled < self.stride {
            let n = self.inner.read(&mut self.buf[filled..])?;
            if n == 0 {
                break;
            }
            filled += n;
        }
        if filled == 0 {
            return Ok(None);
        }
        if filled < self.stride {
            return Err(Error::Malformed(format!(
                "truncated raw frame {}: {filled} of {} bytes",
                self.next_index, self.stride
            )));
        }
        let luma = self.buf[..self.width * self.height].to_vec();
        let frame = LumaFrame::new(self.width, self.height, luma, self.next_index)?;
        self.next_index += 1;
        Ok(Some(frame))
    }
}

impl<R: Read> Iterator for RawReader<R> {
    type Item = Result<LumaFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_frame() {
            Ok(Some(frame)) => Some(Ok(frame)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}
