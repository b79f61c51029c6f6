//! Latent tensors and recorded trajectories.
//!
//! Everything is stored channel-major (`C×H×W`) as 32-bit floats, matching the
//! layout of common latent dumps.

use crate::error::{Error, Result};

/// Shape of one latent snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Shape {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub fn new(channels: usize, height: usize, width: usize) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::invalid(format!(
                "latent dimensions must be positive, got {channels}x{height}x{width}"
            )));
        }
        Ok(Shape { channels, height, width })
    }

    #[inline]
    pub fn plane(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.channels * self.plane()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, channel: usize, x: usize, y: usize) -> usize {
        (channel * self.height + y) * self.width + x
    }

    pub fn contains(&self, coord: Coord) -> bool {
        coord.channel < self.channels && coord.x < self.width && coord.y < self.height
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.channels, self.height, self.width)
    }
}

/// A single latent cell address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub channel: usize,
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub fn new(channel: usize, x: usize, y: usize) -> Self {
        Coord { channel, x, y }
    }
}

/// A dense `C×H×W` latent tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    shape: Shape,
    data: Vec<f32>,
}

impl Latent {
    pub fn zeros(shape: Shape) -> Self {
        Latent { shape, data: vec![0.0; shape.len()] }
    }

    pub fn filled(shape: Shape, value: f32) -> Self {
        Latent { shape, data: vec![value; shape.len()] }
    }

    pub fn from_vec(shape: Shape, data: Vec<f32>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::invalid(format!(
                "{} values cannot fill a {shape} latent",
                data.len()
            )));
        }
        Ok(Latent { shape, data })
    }

    /// Builds a latent from a closure over `(channel, x, y)`.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(shape.len());
        for c in 0..shape.channels {
            for y in 0..shape.height {
                for x in 0..shape.width {
                    data.push(f(c, x, y));
                }
            }
        }
        Latent { shape, data }
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, channel: usize, x: usize, y: usize) -> f32 {
        self.data[self.shape.index(channel, x, y)]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, x: usize, y: usize, value: f32) {
        let i = self.shape.index(channel, x, y);
        self.data[i] = value;
    }

    /// One `H×W` channel plane.
    #[inline]
    pub fn channel(&self, channel: usize) -> &[f32] {
        let n = self.shape.plane();
        &self.data[channel * n..(channel + 1) * n]
    }

    #[inline]
    pub fn channel_mut(&mut self, channel: usize) -> &mut [f32] {
        let n = self.shape.plane();
        &mut self.data[channel * n..(channel + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Bitwise equality, distinguishing `0.0` from `-0.0`.
    pub fn bitwise_eq(&self, other: &Latent) -> bool {
        self.shape == other.shape
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    pub(crate) fn check_same_shape(&self, other: &Latent) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::invalid(format!(
                "shape mismatch: {} vs {}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }
}

/// Ordered predicted-original snapshots recorded from one generation run.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTrajectory {
    snapshots: Vec<Latent>,
    iterations: Vec<i64>,
}

impl LatentTrajectory {
    /// Snapshots numbered `0..T`.
    pub fn new(snapshots: Vec<Latent>) -> Result<Self> {
        let iterations = (0..snapshots.len() as i64).collect();
        Self::with_iterations(snapshots, iterations)
    }

    pub fn with_iterations(snapshots: Vec<Latent>, iterations: Vec<i64>) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| Error::invalid("trajectory must hold at least one snapshot"))?;
        if iterations.len() != snapshots.len() {
            return Err(Error::invalid(format!(
                "{} iteration ids for {} snapshots",
                iterations.len(),
                snapshots.len()
            )));
        }
        let shape = first.shape();
        for (i, s) in snapshots.iter().enumerate() {
            if s.shape() != shape {
                return Err(Error::invalid(format!(
                    "snapshot {i} has shape {}, expected {shape}",
                    s.shape()
                )));
            }
            if !s.is_finite() {
                return Err(Error::validation(format!("snapshot {i} holds NaN or Inf")));
            }
        }
        if iterations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("iteration ids must be strictly increasing"));
        }
        Ok(LatentTrajectory { snapshots, iterations })
    }

    pub fn shape(&self) -> Shape {
        self.snapshots[0].shape()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshots(&self) -> &[Latent] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> &Latent {
        &self.snapshots[t]
    }

    pub fn iterations(&self) -> &[i64] {
        &self.iterations
    }

    pub fn last(&self) -> &Latent {
        self.snapshots.last().expect("non-empty by construction")
    }

    /// Position of an iteration id in the schedule.
    pub fn position_of(&self, iteration: i64) -> Option<usize> {
        self.iterations.binary_search(&iteration).ok()
    }

    pub fn into_snapshots(self) -> Vec<Latent> {
        self.snapshots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_rejects_zero_dims() {
        assert!(Shape::new(4, 0, 64).is_err());
        assert!(Shape::new(0, 1, 1).is_err());
        assert_eq!(Shape::new(1, 1, 1).unwrap().len(), 1);
    }

    #[test]
    fn trajectory_invariants() {
        let s = Shape::new(1, 2, 2).unwrap();
        assert!(LatentTrajectory::new(vec![]).is_err());
        let a = Latent::zeros(s);
        let b = Latent::zeros(Shape::new(1, 2, 3).unwrap());
        assert!(LatentTrajectory::new(vec![a.clone(), b]).is_err());
        assert!(LatentTrajectory::with_iterations(vec![a.clone(), a.clone()], vec![3, 3]).is_err());
        let bad = Latent::filled(s, f32::NAN);
        assert!(matches!(
            LatentTrajectory::new(vec![bad]),
            Err(Error::Validation(_))
        ));
        let t = LatentTrajectory::with_iterations(vec![a.clone(), a], vec![5, 9]).unwrap();
        assert_eq!(t.position_of(9), Some(1));
        assert_eq!(t.position_of(6), None);
    }

    #[test]
    fn bitwise_eq_sees_signed_zero() {
        let s = Shape::new(1, 1, 1).unwrap();
        assert!(!Latent::filled(s, 0.0).bitwise_eq(&Latent::filled(s, -0.0)));
        assert_eq!(Latent::filled(s, 0.0), Latent::filled(s, -0.0));
    }
}
