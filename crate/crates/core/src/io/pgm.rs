//! 8-bit binary PGM previews of latent frames, one image per channel per frame.
//!
//! Each channel is min-max normalized over the whole animation; a channel with
//! no dynamic range maps to mid-gray. The constants land in `normalization.txt`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::latent::Latent;

/// Per-channel value range over a set of frames.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRanges {
    pub min: Vec<f32>,
    pub max: Vec<f32>,
}

impl ChannelRanges {
    pub fn new(channels: usize) -> Self {
        ChannelRanges { min: vec![f32::INFINITY; channels], max: vec![f32::NEG_INFINITY; channels] }
    }

    pub fn observe(&mut self, frame: &Latent) {
        for c in 0..self.min.len() {
            for &v in frame.channel(c) {
                self.min[c] = self.min[c].min(v);
                self.max[c] = self.max[c].max(v);
            }
        }
    }

    pub fn of(frames: &[Latent]) -> Result<Self> {
        let first = frames.first().ok_or_else(|| Error::invalid("no frames"))?;
        let mut r = ChannelRanges::new(first.shape().channels);
        frames.iter().for_each(|f| r.observe(f));
        Ok(r)
    }

    /// Gray level of `v` on channel `c`.
    pub fn gray(&self, c: usize, v: f32) -> u8 {
        let (lo, hi) = (self.min[c], self.max[c]);
        if hi <= lo {
            return 128;
        }
        let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
        (t * 255.0).round() as u8
    }
}

/// Encodes a P5 image.
pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Writes row-major gray levels as a P5 file.
pub fn write_pgm(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_pgm(width, height, pixels))?;
    w.flush()?;
    Ok(())
}

/// Previews of frames sharing one set of ranges, written as `frame_{f:06}_c{c}.pgm`.
pub struct PgmWriter {
    dir: PathBuf,
    ranges: ChannelRanges,
    next: usize,
}

impl PgmWriter {
    pub fn create(dir: impl AsRef<Path>, ranges: ChannelRanges) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut side = BufWriter::new(File::create(dir.join("normalization.txt"))?);
        writeln!(side, "# channel min max (gray = round(255 * (v - min) / (max - min)); 128 when max == min)")?;
        for (c, (lo, hi)) in ranges.min.iter().zip(&ranges.max).enumerate() {
            writeln!(side, "{c} {lo:e} {hi:e}")?;
        }
        side.flush()?;
        Ok(PgmWriter { dir, ranges, next: 0 })
    }

    pub fn push(&mut self, frame: &Latent) -> Result<()> {
        let s = frame.shape();
        for c in 0..s.channels {
            let pixels: Vec<u8> = frame.channel(c).iter().map(|&v| self.ranges.gray(c, v)).collect();
            write_pgm(self.dir.join(format!("frame_{:06}_c{c}.pgm", self.next)), s.width, s.height, &pixels)?;
        }
        self.next += 1;
        Ok(())
    }
}

/// Writes previews of every frame into `dir`.
pub fn write_pgm_frames(frames: &[Latent], dir: impl AsRef<Path>) -> Result<()> {
    let mut w = PgmWriter::create(dir, ChannelRanges::of(frames)?)?;
    for f in frames {
        w.push(f)?;
    }
    Ok(())
}
