//! Per-channel scalar fields: stroke region, information gain, move cost and motivation.

use crate::canvas::Canvas;
use crate::config::{validate_cost, CostMode};
use crate::error::{Error, Result};
use crate::latent::Latent;

/// A row-major `H×W` real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f32>,
}

impl Field {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::invalid(format!(
                "{} values cannot fill a {height}x{width} field",
                data.len()
            )));
        }
        Ok(Field { height, width, data })
    }

    pub fn filled(height: usize, width: usize, value: f32) -> Self {
        Field { height, width, data: vec![value; height * width] }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }
}

/// A row-major `H×W` boolean mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub height: usize,
    pub width: usize,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn new(height: usize, width: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::invalid(format!(
                "{} values cannot fill a {height}x{width} mask",
                data.len()
            )));
        }
        Ok(Mask { height, width, data })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// `(x, y)` of every set cell in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }
}

fn check_channel(canvas: &Canvas, snapshot: &Latent, channel: usize) -> Result<()> {
    canvas.z().check_same_shape(snapshot)?;
    let channels = canvas.shape().channels;
    if channel >= channels {
        return Err(Error::invalid(format!(
            "channel {channel} out of range for {channels} channels"
        )));
    }
    Ok(())
}

/// Cells of `channel` where `|Z - D| > theta` (strict).
pub fn stroke_region(canvas: &Canvas, snapshot: &Latent, channel: usize, theta: f32) -> Result<Mask> {
    check_channel(canvas, snapshot, channel)?;
    let shape = canvas.shape();
    let data = canvas
        .z()
        .channel(channel)
        .iter()
        .zip(snapshot.channel(channel))
        .map(|(z, d)| (z - d).abs() > theta)
        .collect();
    Ok(Mask { height: shape.height, width: shape.width, data })
}

/// Element-wise `|Z_c - D_c|`.
pub fn info_gain(canvas: &Canvas, snapshot: &Latent, channel: usize) -> Result<Field> {
    check_channel(canvas, snapshot, channel)?;
    let shape = canvas.shape();
    let data = canvas
        .z()
        .channel(channel)
        .iter()
        .zip(snapshot.channel(channel))
        .map(|(z, d)| (z - d).abs())
        .collect();
    Ok(Field { height: shape.height, width: shape.width, data })
}

/// Move cost at integer offset `(dx, dy)` from the last stroke.
#[inline]
pub(crate) fn move_cost_at(dx: usize, dy: usize, sigma: f32, epsilon: f32, mode: CostMode) -> f32 {
    let d2 = (dx * dx + dy * dy) as f32;
    let bump = (-d2 / (2.0 * sigma * sigma)).exp();
    match mode {
        CostMode::Near => epsilon + (1.0 - epsilon) * bump,
        CostMode::Far => 1.0 - (1.0 - epsilon) * bump,
        CostMode::Off => 1.0,
    }
}

/// Brush move cost centred on the last stroke; all ones before the first stroke
/// or with the cost switched off.
pub fn move_cost_field(
    center: Option<(usize, usize)>,
    height: usize,
    width: usize,
    sigma: f32,
    epsilon: f32,
    mode: CostMode,
) -> Result<Field> {
    validate_cost(sigma, epsilon)?;
    let Some((cx, cy)) = center.filter(|_| mode != CostMode::Off) else {
        return Ok(Field::filled(height, width, 1.0));
    };
    let mut data = Vec::with_capacity(height * width);
    for y in 0..height {
        for x in 0..width {
            data.push(move_cost_at(x.abs_diff(cx), y.abs_diff(cy), sigma, epsilon, mode));
        }
    }
    Ok(Field { height, width, data })
}

/// Gain modulated by move cost, `V = G · M`.
pub fn motivation_field(gain: &Field, cost: &Field) -> Result<Field> {
    if gain.height != cost.height || gain.width != cost.width {
        return Err(Error::invalid(format!(
            "gain is {}x{} but cost is {}x{}",
            gain.height, gain.width, cost.height, cost.width
        )));
    }
    let data = gain.data.iter().zip(&cost.data).map(|(g, m)| g * m).collect();
    Ok(Field { height: gain.height, width: gain.width, data })
}

/// Move cost tabulated by absolute offset, so the per-stroke field is a lookup.
#[derive(Debug, Clone)]
pub(crate) struct CostTable {
    width: usize,
    values: Vec<f32>,
    mode: CostMode,
}

impl CostTable {
    pub(crate) fn new(height: usize, width: usize, sigma: f32, epsilon: f32, mode: CostMode) -> Self {
        let mut values = Vec::with_capacity(height * width);
        for dy in 0..height {
            for dx in 0..width {
                values.push(move_cost_at(dx, dy, sigma, epsilon, mode));
            }
        }
        CostTable { width, values, mode }
    }

    #[inline]
    pub(crate) fn is_flat(&self) -> bool {
        self.mode == CostMode::Off
    }

    /// Cost at `(x, y)` for a stroke centred at `center`.
    #[inline]
    pub(crate) fn at(&self, (cx, cy): (usize, usize), x: usize, y: usize) -> f32 {
        self.values[y.abs_diff(cy) * self.width + x.abs_diff(cx)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latent::Shape;

    fn canvas_and(d: &[f32], h: usize, w: usize) -> (Canvas, Latent) {
        let shape = Shape::new(1, h, w).unwrap();
        (Canvas::with_shape(shape), Latent::from_vec(shape, d.to_vec()).unwrap())
    }

    #[test]
    fn region_rule() {
        let (canvas, d) = canvas_and(&[1.0, -1.0, 0.0, 2.0], 2, 2);
        let r = stroke_region(&canvas, &d, 0, 0.1).unwrap();
        assert_eq!(r.data, vec![true, true, false, true]);
        assert!(stroke_region(&canvas, canvas.z(), 0, 0.1).unwrap().is_empty());
        assert!(stroke_region(&canvas, &d, 1, 0.1).is_err());
    }

    #[test]
    fn region_boundary_is_strict() {
        let (canvas, d) = canvas_and(&[0.5, 0.25], 1, 2);
        let r = stroke_region(&canvas, &d, 0, 0.5).unwrap();
        assert_eq!(r.data, vec![false, false]);
    }

    #[test]
    fn gain_examples() {
        let (canvas, d) = canvas_and(&[0.5; 4], 2, 2);
        assert_eq!(info_gain(&canvas, &d, 0).unwrap().data, vec![0.5; 4]);
        assert_eq!(info_gain(&canvas, canvas.z(), 0).unwrap().data, vec![0.0; 4]);
        assert!(info_gain(&canvas, &d, 3).is_err());
    }

    #[test]
    fn cost_shapes() {
        let near = move_cost_field(Some((5, 5)), 64, 64, 8.0, 0.25, CostMode::Near).unwrap();
        assert_eq!(near.get(5, 5), 1.0);
        assert!((near.get(63, 63) - 0.25).abs() < 1e-6);
        let far = move_cost_field(Some((5, 5)), 64, 64, 8.0, 0.25, CostMode::Far).unwrap();
        assert_eq!(far.get(5, 5), 0.25);
        assert!((far.get(63, 63) - 1.0).abs() < 1e-6);
        let fresh = move_cost_field(None, 4, 4, 8.0, 0.25, CostMode::Near).unwrap();
        assert!(fresh.data.iter().all(|&m| m == 1.0));
        let off = move_cost_field(Some((1, 1)), 4, 4, 8.0, 0.25, CostMode::Off).unwrap();
        assert!(off.data.iter().all(|&m| m == 1.0));
        assert!(move_cost_field(None, 4, 4, 0.0, 0.25, CostMode::Near).is_err());
        assert!(move_cost_field(None, 4, 4, 1.0, 0.0, CostMode::Near).is_err());
        assert!(move_cost_field(None, 4, 4, 1.0, 1.5, CostMode::Near).is_err());
    }

    #[test]
    fn cost_table_matches_field() {
        for mode in [CostMode::Near, CostMode::Far] {
            let table = CostTable::new(9, 7, 2.5, 0.3, mode);
            let field = move_cost_field(Some((2, 6)), 9, 7, 2.5, 0.3, mode).unwrap();
            for y in 0..9 {
                for x in 0..7 {
                    assert_eq!(table.at((2, 6), x, y).to_bits(), field.get(x, y).to_bits());
                }
            }
        }
    }

    #[test]
    fn motivation_examples() {
        let g = Field::new(1, 3, vec![0.0, 2.0, 3.0]).unwrap();
        let ones = Field::filled(1, 3, 1.0);
        assert_eq!(motivation_field(&g, &ones).unwrap(), g);
        let m = Field::new(1, 3, vec![5.0, 0.5, 2.0]).unwrap();
        assert_eq!(motivation_field(&g, &m).unwrap().data, vec![0.0, 1.0, 6.0]);
        assert!(motivation_field(&g, &Field::filled(3, 1, 1.0)).is_err());
    }
}
