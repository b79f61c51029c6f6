//! NPY v1.0 reading and writing for little-endian `f32` tensors (and `u32`
//! heatmaps).
//!
//! Headers are laid out exactly as numpy writes them, including the spare
//! spaces reserved after the dict so the leading dimension can grow in place.
//! The streaming frame writer relies on that to patch the frame count at the end.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::latent::{Latent, LatentTrajectory, Shape};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;
/// Digits numpy reserves for the leading dimension.
const GROWTH_AXIS_MAX_DIGITS: usize = 21;

/// Element types this crate reads and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    U32,
}

impl Dtype {
    fn descr(self) -> &'static str {
        match self {
            Dtype::F32 => "<f4",
            Dtype::U32 => "<u4",
        }
    }

    fn from_descr(s: &str) -> Result<Self> {
        match s {
            "<f4" => Ok(Dtype::F32),
            "<u4" => Ok(Dtype::U32),
            other => Err(Error::format(format!("unsupported dtype {other:?}; expected '<f4' or '<u4'"))),
        }
    }
}

/// Axis order of a trajectory file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Layout {
    /// `(T, C, H, W)`.
    #[default]
    Tchw,
    /// `(T, H, W, C)`, transposed on read.
    Thwc,
}

/// Parsed header fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpyHeader {
    pub dtype: Dtype,
    pub shape: Vec<usize>,
}

fn shape_repr(shape: &[usize]) -> String {
    match shape {
        [] => "()".to_string(),
        [n] => format!("({n},)"),
        _ => format!("({})", shape.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")),
    }
}

/// Complete header bytes (magic through the trailing newline).
pub fn encode_header(dtype: Dtype, shape: &[usize]) -> Vec<u8> {
    let mut dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        dtype.descr(),
        shape_repr(shape)
    );
    if let Some(first) = shape.first() {
        let used = first.to_string().len();
        dict.push_str(&" ".repeat(GROWTH_AXIS_MAX_DIGITS.saturating_sub(used)));
    }
    let hlen = dict.len() + 1;
    let padlen = ALIGN - ((MAGIC.len() + 2 + 2 + hlen) % ALIGN);
    let total = hlen + padlen;
    let mut out = Vec::with_capacity(10 + total);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(total as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.extend(std::iter::repeat_n(b' ', padlen));
    out.push(b'\n');
    out
}

fn parse_dict(text: &str) -> Result<NpyHeader> {
    let bad = |what: &str| Error::format(format!("malformed NPY header ({what}): {text:?}"));
    let body = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.trim_end().strip_suffix('}'))
        .ok_or_else(|| bad("not a dict"))?;

    let value_after = |key: &str| -> Result<&str> {
        let k = body.find(&format!("'{key}'")).ok_or_else(|| bad(key))?;
        let rest = &body[k + key.len() + 2..];
        let rest = rest.trim_start().strip_prefix(':').ok_or_else(|| bad(key))?;
        Ok(rest.trim_start())
    };

    let descr = value_after("descr")?;
    let descr = descr.strip_prefix('\'').ok_or_else(|| bad("descr"))?;
    let descr = &descr[..descr.find('\'').ok_or_else(|| bad("descr"))?];
    let dtype = Dtype::from_descr(descr)?;

    let fortran = value_after("fortran_order")?;
    if fortran.starts_with("True") {
        return Err(Error::format("Fortran-ordered arrays are not supported"));
    } else if !fortran.starts_with("False") {
        return Err(bad("fortran_order"));
    }

    let shape = value_after("shape")?;
    let shape = shape.strip_prefix('(').ok_or_else(|| bad("shape"))?;
    let shape = &shape[..shape.find(')').ok_or_else(|| bad("shape"))?];
    let dims = shape
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| bad("shape")))
        .collect::<Result<Vec<_>>>()?;

    Ok(NpyHeader { dtype, shape: dims })
}

/// Reads the header and leaves `r` positioned at the payload.
pub fn read_header(r: &mut impl Read) -> Result<NpyHeader> {
    let mut pre = [0u8; 8];
    r.read_exact(&mut pre).map_err(|_| Error::format("file too short for an NPY header"))?;
    if &pre[..6] != MAGIC {
        return Err(Error::format("missing NPY magic"));
    }
    let len = match (pre[6], pre[7]) {
        (1, 0) => {
            let mut b = [0u8; 2];
            r.read_exact(&mut b).map_err(|_| Error::format("truncated NPY header"))?;
            u16::from_le_bytes(b) as usize
        }
        (2, 0) => {
            let mut b = [0u8; 4];
            r.read_exact(&mut b).map_err(|_| Error::format("truncated NPY header"))?;
            u32::from_le_bytes(b) as usize
        }
        (major, minor) => return Err(Error::format(format!("unsupported NPY version {major}.{minor}"))),
    };
    let mut text = vec![0u8; len];
    r.read_exact(&mut text).map_err(|_| Error::format("truncated NPY header"))?;
    let text = std::str::from_utf8(&text).map_err(|_| Error::format("NPY header is not ASCII"))?;
    parse_dict(text)
}

fn read_payload(r: &mut impl Read, count: usize) -> Result<Vec<[u8; 4]>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != count * 4 {
        return Err(Error::format(format!(
            "payload holds {} bytes, header promises {}",
            bytes.len(),
            count * 4
        )));
    }
    Ok(bytes.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect())
}

/// Reads an `f32` array of any rank.
pub fn read_f32(path: impl AsRef<Path>) -> Result<(Vec<usize>, Vec<f32>)> {
    let mut r = BufReader::new(File::open(path)?);
    let header = read_header(&mut r)?;
    if header.dtype != Dtype::F32 {
        return Err(Error::format("expected '<f4' data"));
    }
    let n = header.shape.iter().product();
    let data = read_payload(&mut r, n)?.into_iter().map(f32::from_le_bytes).collect();
    Ok((header.shape, data))
}

/// Reads a `u32` array of any rank.
pub fn read_u32(path: impl AsRef<Path>) -> Result<(Vec<usize>, Vec<u32>)> {
    let mut r = BufReader::new(File::open(path)?);
    let header = read_header(&mut r)?;
    if header.dtype != Dtype::U32 {
        return Err(Error::format("expected '<u4' data"));
    }
    let n = header.shape.iter().product();
    let data = read_payload(&mut r, n)?.into_iter().map(u32::from_le_bytes).collect();
    Ok((header.shape, data))
}

fn write_array<T: Copy>(path: &Path, dtype: Dtype, shape: &[usize], data: &[T], le: fn(T) -> [u8; 4]) -> Result<()> {
    let expected: usize = shape.iter().product();
    if expected != data.len() {
        return Err(Error::invalid(format!("{} values for shape {shape:?}", data.len())));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_header(dtype, shape))?;
    for &v in data {
        w.write_all(&le(v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_f32(path: impl AsRef<Path>, shape: &[usize], data: &[f32]) -> Result<()> {
    write_array(path.as_ref(), Dtype::F32, shape, data, f32::to_le_bytes)
}

pub fn write_u32(path: impl AsRef<Path>, shape: &[usize], data: &[u32]) -> Result<()> {
    write_array(path.as_ref(), Dtype::U32, shape, data, u32::to_le_bytes)
}

/// Loads a rank-4 trajectory, transposing `(T, H, W, C)` files into channel-major order.
pub fn read_trajectory(path: impl AsRef<Path>, layout: Layout) -> Result<LatentTrajectory> {
    let (dims, data) = read_f32(path)?;
    let [t, a, b, c] = dims[..] else {
        return Err(Error::validation(format!("trajectory must be rank 4, got shape {dims:?}")));
    };
    let (channels, height, width) = match layout {
        Layout::Tchw => (a, b, c),
        Layout::Thwc => (c, a, b),
    };
    if t == 0 {
        return Err(Error::validation("trajectory holds no snapshots"));
    }
    let shape = Shape::new(channels, height, width).map_err(|e| Error::validation(e.to_string()))?;
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::validation(format!("non-finite value at flat index {i}")));
    }
    let snapshots = data
        .chunks_exact(shape.len())
        .map(|chunk| match layout {
            Layout::Tchw => Latent::from_vec(shape, chunk.to_vec()),
            Layout::Thwc => Ok(Latent::from_fn(shape, |ch, x, y| chunk[(y * width + x) * channels + ch])),
        })
        .collect::<Result<Vec<_>>>()?;
    LatentTrajectory::new(snapshots)
}

/// Writes a `(T, C, H, W)` trajectory file.
pub fn write_trajectory(path: impl AsRef<Path>, trajectory: &LatentTrajectory) -> Result<()> {
    write_frames(trajectory.snapshots(), path)
}

/// Writes frames as one `(F, C, H, W)` array.
pub fn write_frames(frames: &[Latent], path: impl AsRef<Path>) -> Result<()> {
    let first = frames.first().ok_or_else(|| Error::invalid("no frames to write"))?;
    let mut w = FrameWriter::create(path, first.shape())?;
    for f in frames {
        w.push(f)?;
    }
    w.finish()?;
    Ok(())
}

/// Streams frames into an `(F, C, H, W)` file, fixing up `F` on [`FrameWriter::finish`].
pub struct FrameWriter {
    out: BufWriter<File>,
    shape: Shape,
    frames: usize,
}

impl FrameWriter {
    pub fn create(path: impl AsRef<Path>, shape: Shape) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(&encode_header(Dtype::F32, &Self::dims(0, shape)))?;
        Ok(FrameWriter { out, shape, frames: 0 })
    }

    fn dims(frames: usize, s: Shape) -> [usize; 4] {
        [frames, s.channels, s.height, s.width]
    }

    pub fn push(&mut self, frame: &Latent) -> Result<()> {
        if frame.shape() != self.shape {
            return Err(Error::invalid(format!("frame {} does not match {}", frame.shape(), self.shape)));
        }
        let mut buf = Vec::with_capacity(self.shape.len() * 4);
        for v in frame.as_slice() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        self.out.write_all(&buf)?;
        self.frames += 1;
        Ok(())
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    /// Rewrites the header with the final frame count and returns it.
    pub fn finish(mut self) -> Result<usize> {
        let header = encode_header(Dtype::F32, &Self::dims(self.frames, self.shape));
        self.out.flush()?;
        let file = self.out.get_mut();
        file.seek(SeekFrom::Start(0))?;
        file.write_all(&header)?;
        file.flush()?;
        Ok(self.frames)
    }
}

impl crate::sink::FrameSink for FrameWriter {
    fn frame(&mut self, _index: u64, canvas: &crate::Canvas) -> Result<()> {
        self.push(canvas.z())
    }
}

/// Iterates the frames of an `(F, C, H, W)` file without loading it whole.
pub struct FrameReader {
    input: BufReader<File>,
    shape: Shape,
    remaining: usize,
}

impl FrameReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let mut input = BufReader::new(File::open(path)?);
        let header = read_header(&mut input)?;
        if header.dtype != Dtype::F32 {
            return Err(Error::format("expected '<f4' frames"));
        }
        let [f, c, h, w] = header.shape[..] else {
            return Err(Error::validation(format!("frames must be rank 4, got {:?}", header.shape)));
        };
        let shape = Shape::new(c, h, w).map_err(|e| Error::validation(e.to_string()))?;
        Ok(FrameReader { input, shape, remaining: f })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.remaining
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }
}

impl Iterator for FrameReader {
    type Item = Result<Latent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let mut bytes = vec![0u8; self.shape.len() * 4];
        if let Err(e) = self.input.read_exact(&mut bytes) {
            self.remaining = 0;
            return Some(Err(Error::format(format!("truncated frame payload: {e}"))));
        }
        let data = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        Some(Latent::from_vec(self.shape, data))
    }
}
