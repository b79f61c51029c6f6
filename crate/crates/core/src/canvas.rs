//! The painter state: an evolving latent plus a cumulative stroke heatmap.

use crate::error::{Error, Result};
use crate::latent::{Coord, Latent, Shape};

/// Painter state `Z` together with the stroke heatmap stacked over channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    z: Latent,
    heatmap: Vec<u32>,
    frame_counter: u64,
}

impl Canvas {
    /// A zero canvas of `c×h×w`.
    pub fn new(c: usize, h: usize, w: usize) -> Result<Self> {
        Ok(Self::with_shape(Shape::new(c, h, w)?))
    }

    pub fn with_shape(shape: Shape) -> Self {
        Canvas {
            z: Latent::zeros(shape),
            heatmap: vec![0; shape.plane()],
            frame_counter: 0,
        }
    }

    pub fn shape(&self) -> Shape {
        self.z.shape()
    }

    pub fn z(&self) -> &Latent {
        &self.z
    }

    /// Row-major `H×W` stroke counts.
    pub fn heatmap(&self) -> &[u32] {
        &self.heatmap
    }

    pub fn frame_counter(&self) -> u64 {
        self.frame_counter
    }

    pub(crate) fn advance_frame(&mut self) -> u64 {
        let f = self.frame_counter;
        self.frame_counter += 1;
        f
    }

    /// Overwrites the latent without touching the heatmap (used by value-blending effects).
    pub(crate) fn set_z(&mut self, z: Latent) {
        debug_assert_eq!(z.shape(), self.z.shape());
        self.z = z;
    }

    /// Copies `target` into the canvas at exactly `coords`; every released
    /// coordinate bumps the heatmap at its `(x, y)`.
    ///
    /// All coordinates are validated before anything is written.
    pub fn release_coords(&mut self, target: &Latent, coords: &[Coord]) -> Result<()> {
        self.z.check_same_shape(target)?;
        let shape = self.shape();
        if let Some(bad) = coords.iter().find(|c| !shape.contains(**c)) {
            return Err(Error::invalid(format!(
                "coordinate (c={}, x={}, y={}) outside {shape} canvas",
                bad.channel, bad.x, bad.y
            )));
        }
        let src = target.as_slice();
        let dst = self.z.as_mut_slice();
        for c in coords {
            let i = shape.index(c.channel, c.x, c.y);
            dst[i] = src[i];
            self.heatmap[c.y * shape.width + c.x] += 1;
        }
        Ok(())
    }

    /// Copies one channel of `target` over the inclusive rectangle
    /// `[x0, x1] × [y0, y1]`, bumping the heatmap once per cell.
    pub(crate) fn release_rect(
        &mut self,
        target: &Latent,
        channel: usize,
        (x0, x1): (usize, usize),
        (y0, y1): (usize, usize),
    ) {
        let shape = self.shape();
        let src = target.channel(channel);
        let dst = self.z.channel_mut(channel);
        for y in y0..=y1 {
            let row = y * shape.width;
            dst[row + x0..=row + x1].copy_from_slice(&src[row + x0..=row + x1]);
            for h in &mut self.heatmap[row + x0..=row + x1] {
                *h += 1;
            }
        }
    }

    /// Sum of `|Z - target|`, over all cells or one channel.
    pub fn l1_gap(&self, target: &Latent, channel: Option<usize>) -> Result<f64> {
        self.z.check_same_shape(target)?;
        match channel {
            None => Ok(abs_diff_sum(self.z.as_slice(), target.as_slice())),
            Some(c) if c < self.shape().channels => {
                Ok(abs_diff_sum(self.z.channel(c), target.channel(c)))
            }
            Some(c) => Err(Error::invalid(format!(
                "channel {c} out of range for {} channels",
                self.shape().channels
            ))),
        }
    }

    /// Coordinates whose value differs bitwise from `target`, channel-major.
    pub(crate) fn differing_coords(&self, target: &Latent) -> Vec<Coord> {
        let shape = self.shape();
        let mut out = Vec::new();
        let (z, d) = (self.z.as_slice(), target.as_slice());
        for c in 0..shape.channels {
            for y in 0..shape.height {
                for x in 0..shape.width {
                    let i = shape.index(c, x, y);
                    if z[i].to_bits() != d[i].to_bits() {
                        out.push(Coord::new(c, x, y));
                    }
                }
            }
        }
        out
    }
}

/// Sequential f64 accumulation of `|a - b|` (differences taken in f32).
#[inline]
pub(crate) fn abs_diff_sum(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs() as f64).sum()
}
