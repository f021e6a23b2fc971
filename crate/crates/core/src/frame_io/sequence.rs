use std::path::{Path, PathBuf};

use image::DynamicImage;

use crate::error::{Error, Result};
use crate::frame::LumaFrame;

/// Lexicographically ordered directory of 8-bit grayscale PGM images.
pub struct ImageSequenceReader {
    paths: std::vec::IntoIter<PathBuf>,
    next_index: usize,
    geometry: Option<(usize, usize)>,
}

impl ImageSequenceReader {
    pub fn open(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            let is_pgm = path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
            if is_pgm && path.is_file() {
                paths.push(path);
            }
        }
        paths.sort();
        Ok(Self {
            paths: paths.into_iter(),
            next_index: 0,
            geometry: None,
        })
    }

    fn load(&mut self, path: &Path) -> Result<LumaFrame> {
        let image = image::ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .with_guessed_format()
            .map_err(|e| Error::io(path, e))?
            .decode()?;
        let gray = match image {
            DynamicImage::ImageLuma8(gray) => gray,
            other => {
                return Err(Error::UnsupportedFormat(format!(
                    "{} is {:?}; only 8-bit grayscale images are accepted",
                    path.display(),
                    other.color()
                )))
            }
        };
        let (w, h) = (gray.width() as usize, gray.height() as usize);
        match self.geometry {
            None => self.geometry = Some((w, h)),
            Some(g) if g != (w, h) => {
                return Err(Error::Malformed(format!(
                    "{} is {w}x{h}, earlier frames are {}x{}",
                    path.display(),
                    g.0,
                    g.1
                )))
            }
            Some(_) => {}
        }
        let frame = LumaFrame::new(w, h, gray.into_raw(), self.next_index)?;
        self.next_index += 1;
        Ok(frame)
    }
}

impl Iterator for ImageSequenceReader {
    type Item = Result<LumaFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        let path = self.paths.next()?;
        Some(self.load(&path))
    }
}
