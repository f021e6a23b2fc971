use std::io::{BufRead, Read};

use crate::error::{Error, Result};
use crate::frame::LumaFrame;

const MAGIC: &[u8] = b"YUV4MPEG2";
const FRAME_TAG: &[u8] = b"FRAME";
const MAX_HEADER: usize = 4096;

/// Chroma arrangement declared by the `C` header parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Chroma {
    C420,
    C422,
    C444,
    C411,
    Mono,
}

impl Chroma {
    fn parse(tag: &str) -> Result<Self> {
        match tag {
            "420" | "420jpeg" | "420paldv" | "420mpeg2" => Ok(Chroma::C420),
            "422" => Ok(Chroma::C422),
            "444" => Ok(Chroma::C444),
            "411" => Ok(Chroma::C411),
            "mono" => Ok(Chroma::Mono),
            other => Err(Error::UnsupportedFormat(format!("y4m colorspace C{other}"))),
        }
    }

    fn chroma_bytes(self, width: usize, height: usize) -> usize {
        match self {
            Chroma::C420 => 2 * width.div_ceil(2) * height.div_ceil(2),
            Chroma::C422 => 2 * width.div_ceil(2) * height,
            Chroma::C444 => 2 * width * height,
            Chroma::C411 => 2 * width.div_ceil(4) * height,
            Chroma::Mono => 0,
        }
    }
}

/// Streaming YUV4MPEG2 reader that keeps only the Y plane.
pub struct Y4mReader<R> {
    inner: R,
    width: usize,
    height: usize,
    chroma_len: usize,
    next_index: usize,
    done: bool,
}

impl<R: BufRead> Y4mReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let header = read_line(&mut inner)?.ok_or_else(|| Error::Malformed("empty y4m stream".into()))?;
        let mut tokens = header.split(|&b| b == b' ').filter(|t| !t.is_empty());
        if tokens.next() != Some(MAGIC) {
            return Err(Error::Malformed("missing YUV4MPEG2 signature".into()));
        }
        let mut width = None;
        let mut height = None;
        let mut chroma = Chroma::C420;
        for token in tokens {
            let value = std::str::from_utf8(&token[1..])
                .map_err(|_| Error::Malformed("non-UTF-8 y4m header parameter".into()))?;
            match token[0] {
                b'W' => width = Some(parse_dim(value)?),
                b'H' => height = Some(parse_dim(value)?),
                b'C' => chroma = Chroma::parse(value)?,
                // Frame rate, interlacing, aspect ratio and X-extensions
                // do not affect the sample layout.
                _ => {}
            }
        }
        let (width, height) = match (width, height) {
            (Some(w), Some(h)) => (w, h),
            _ => return Err(Error::Malformed("y4m header lacks W or H".into())),
        };
        Ok(Self {
            inner,
            width,
            height,
            chroma_len: chroma.chroma_bytes(width, height),
            next_index: 0,
            done: false,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn read_frame(&mut self) -> Result<Option<LumaFrame>> {
        let Some(line) = read_line(&mut self.inner)? else {
            return Ok(None);
        };
        if !line.starts_with(FRAME_TAG) {
            return Err(Error::Malformed(format!(
                "expected FRAME marker before frame {}",
                self.next_index
            )));
        }
        let mut luma = vec![0u8; self.width * self.height];
        self.inner
            .read_exact(&mut luma)
            .map_err(|_| Error::Malformed(format!("truncated luma plane in frame {}", self.next_index)))?;
        let skipped = std::io::copy(
            &mut (&mut self.inner).take(self.chroma_len as u64),
            &mut std::io::sink(),
        )?;
        if skipped != self.chroma_len as u64 {
            return Err(Error::Malformed(format!(
                "truncated chroma planes in frame {}",
                self.next_index
            )));
        }
        let frame = LumaFrame::new(self.width, self.height, luma, self.next_index)?;
        self.next_index += 1;
        Ok(Some(frame))
    }
}

impl<R: BufRead> Iterator for Y4mReader<R> {
    type Item = Result<LumaFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.read_frame().transpose();
        if !matches!(item, Some(Ok(_))) {
            self.done = true;
        }
        item
    }
}

fn parse_dim(value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Malformed(format!("bad y4m dimension {value:?}")))
}

/// Reads one `\n`-terminated line, without the terminator. `None` at clean EOF.
fn read_line<R: BufRead>(reader: &mut R) -> Result<Option<Vec<u8>>> {
    let mut line = Vec::new();
    let n = reader.by_ref().take(MAX_HEADER as u64).read_until(b'\n', &mut line)?;
    if n == 0 {
        return Ok(None);
    }
    if line.last() != Some(&b'\n') {
        return Err(Error::Malformed("unterminated y4m header line".into()));
    }
    line.pop();
    Ok(Some(line))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(header: &str, frames: &[Vec<u8>]) -> Vec<u8> {
        let mut out = format!("{header}\n").into_bytes();
        for f in frames {
            out.extend_from_slice(b"FRAME\n");
            out.extend_from_slice(f);
        }
        out
    }

    #[test]
    fn mono_stream() {
        let data = stream("YUV4MPEG2 W3 H3 F25:1 Cmono", &[vec![7; 9], vec![9; 9]]);
        let frames: Vec<_> = Y4mReader::new(&data[..]).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1].samples(), &[9; 9]);
        assert_eq!(frames[1].frame_index(), 1);
    }

    #[test]
    fn odd_dimensions_round_chroma_up() {
        let frame = vec![1u8; 5 * 3 + 2 * 3 * 2];
        let data = stream("YUV4MPEG2 W5 H3 C420jpeg", &[frame]);
        let frames: Vec<_> = Y4mReader::new(&data[..]).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(frames.len(), 1);
    }

    #[test]
    fn rejects_high_bit_depth() {
        let data = stream("YUV4MPEG2 W4 H4 C420p10", &[]);
        assert!(matches!(Y4mReader::new(&data[..]), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn truncated_frame_is_an_error() {
        let mut data = stream("YUV4MPEG2 W4 H4 Cmono", &[vec![0; 16]]);
        data.extend_from_slice(b"FRAME\n\x01\x02");
        let results: Vec<_> = Y4mReader::new(&data[..]).unwrap().collect();
        assert_eq!(results.len(), 2);
        assert!(results[1].is_err());
    }

    #[test]
    fn missing_signature() {
        assert!(Y4mReader::new(&b"YUV4MPEG W4 H4\n"[..]).is_err());
    }
}
