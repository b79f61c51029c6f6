//! Box-sum argmax over the stroke region.
//!
//! Candidate scores are the clipped `(2r+1)²` neighbourhood sums of the
//! motivation field, accumulated in f64 in row-major order. A summed-area
//! table screens every candidate in O(1); only candidates that land within the
//! table's rounding bound of the best score are re-summed directly, so the
//! chosen point is exactly the argmax of the direct sums.

use crate::error::{Error, Result};

use super::fields::{Field, Mask};

/// Inclusive clipped footprint of a square neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Footprint {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

impl Footprint {
    pub fn around(x: usize, y: usize, radius: usize, height: usize, width: usize) -> Self {
        Footprint {
            x0: x.saturating_sub(radius),
            x1: (x + radius).min(width - 1),
            y0: y.saturating_sub(radius),
            y1: (y + radius).min(height - 1),
        }
    }

    pub fn cell_count(&self) -> usize {
        (self.x1 - self.x0 + 1) * (self.y1 - self.y0 + 1)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y0..=self.y1).flat_map(move |y| (self.x0..=self.x1).map(move |x| (x, y)))
    }
}

/// Direct neighbourhood sum; the reference score for placement.
#[inline]
pub(crate) fn box_sum(v: &[f32], height: usize, width: usize, x: usize, y: usize, radius: usize) -> f64 {
    let fp = Footprint::around(x, y, radius, height, width);
    let mut s = 0.0f64;
    for yy in fp.y0..=fp.y1 {
        for &val in &v[yy * width + fp.x0..=yy * width + fp.x1] {
            s += val as f64;
        }
    }
    s
}

/// Reusable summed-area scratch space for repeated picks on one canvas size.
#[derive(Debug, Clone, Default)]
pub(crate) struct Placer {
    sat: Vec<f64>,
    near_best: Vec<(usize, usize)>,
}

impl Placer {
    /// Argmax of the neighbourhood sum of `v` over set cells of `region`;
    /// ties go to the smallest `y`, then the smallest `x`. `v` must be non-negative.
    pub(crate) fn pick(
        &mut self,
        v: &[f32],
        region: &[bool],
        height: usize,
        width: usize,
        radius: usize,
    ) -> Option<(usize, usize)> {
        let stride = width + 1;
        self.sat.clear();
        self.sat.resize(stride * (height + 1), 0.0);
        for y in 0..height {
            let mut row = 0.0f64;
            for x in 0..width {
                row += v[y * width + x] as f64;
                self.sat[(y + 1) * stride + x + 1] = self.sat[y * stride + x + 1] + row;
            }
        }
        let total = self.sat[height * stride + width];
        let rect = |x: usize, y: usize| {
            let fp = Footprint::around(x, y, radius, height, width);
            self.sat[(fp.y1 + 1) * stride + fp.x1 + 1] - self.sat[fp.y0 * stride + fp.x1 + 1]
                - self.sat[(fp.y1 + 1) * stride + fp.x0]
                + self.sat[fp.y0 * stride + fp.x0]
        };

        let mut best = f64::NEG_INFINITY;
        let mut any = false;
        for (i, _) in region.iter().enumerate().filter(|(_, &r)| r) {
            any = true;
            best = best.max(rect(i % width, i / width));
        }
        if !any {
            return None;
        }

        let side = (2 * radius + 1) as f64;
        let bound = (4.0 * (height + width) as f64 + side * side + 16.0) * f64::EPSILON * total;
        let floor = best - 2.0 * bound;
        self.near_best.clear();
        for (i, _) in region.iter().enumerate().filter(|(_, &r)| r) {
            let (x, y) = (i % width, i / width);
            if rect(x, y) >= floor {
                self.near_best.push((x, y));
            }
        }

        let mut pick = None;
        let mut pick_score = f64::NEG_INFINITY;
        for &(x, y) in &self.near_best {
            let s = box_sum(v, height, width, x, y, radius);
            if s > pick_score {
                pick_score = s;
                pick = Some((x, y));
            }
        }
        pick
    }
}

/// Chooses the stroke centre: the region cell whose clipped square
/// neighbourhood carries the largest total motivation.
pub fn pick_stroke_point(v: &Field, region: &Mask, radius: usize) -> Result<(usize, usize)> {
    if v.height != region.height || v.width != region.width {
        return Err(Error::invalid("motivation field and region differ in size"));
    }
    if let Some(bad) = v.data.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::invalid(format!("motivation must be finite and non-negative, got {bad}")));
    }
    Placer::default()
        .pick(&v.data, &region.data, v.height, v.width, radius)
        .ok_or_else(|| Error::Precondition("stroke region is empty".into()))
}
