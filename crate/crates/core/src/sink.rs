//! Frame consumers.

use crate::canvas::Canvas;
use crate::error::Result;
use crate::latent::Latent;

/// Receives the canvas every time an animation frame completes.
pub trait FrameSink {
    fn frame(&mut self, index: u64, canvas: &Canvas) -> Result<()>;
}

/// Discards frames.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl FrameSink for NullSink {
    fn frame(&mut self, _index: u64, _canvas: &Canvas) -> Result<()> {
        Ok(())
    }
}

/// Keeps every frame in memory.
#[derive(Debug, Default, Clone)]
pub struct CollectFrames {
    pub frames: Vec<Latent>,
}

impl FrameSink for CollectFrames {
    fn frame(&mut self, _index: u64, canvas: &Canvas) -> Result<()> {
        self.frames.push(canvas.z().clone());
        Ok(())
    }
}

/// Counts frames without storing them.
#[derive(Debug, Default, Clone, Copy)]
pub struct CountFrames(pub u64);

impl FrameSink for CountFrames {
    fn frame(&mut self, _index: u64, _canvas: &Canvas) -> Result<()> {
        self.0 += 1;
        Ok(())
    }
}

/// Records the L1 change each frame introduces relative to the previous one.
#[derive(Debug, Clone)]
pub struct ReleaseMeter {
    previous: Latent,
    pub released: Vec<f64>,
}

impl ReleaseMeter {
    /// Starts from `initial`, usually the zero canvas.
    pub fn new(initial: Latent) -> Self {
        ReleaseMeter { previous: initial, released: Vec::new() }
    }

    /// Population coefficient of variation of the per-frame releases.
    pub fn coefficient_of_variation(&self) -> f64 {
        coefficient_of_variation(&self.released)
    }
}

impl FrameSink for ReleaseMeter {
    fn frame(&mut self, _index: u64, canvas: &Canvas) -> Result<()> {
        let z = canvas.z().as_slice();
        let step = crate::canvas::abs_diff_sum(z, self.previous.as_slice());
        self.released.push(step);
        self.previous.as_mut_slice().copy_from_slice(z);
        Ok(())
    }
}

/// Standard deviation over mean; zero for empty or all-zero input.
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

impl<S: FrameSink + ?Sized> FrameSink for &mut S {
    fn frame(&mut self, index: u64, canvas: &Canvas) -> Result<()> {
        (**self).frame(index, canvas)
    }
}

/// Feeds two sinks in turn.
pub struct Tee<A, B>(pub A, pub B);

impl<A: FrameSink, B: FrameSink> FrameSink for Tee<A, B> {
    fn frame(&mut self, index: u64, canvas: &Canvas) -> Result<()> {
        self.0.frame(index, canvas)?;
        self.1.frame(index, canvas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cv_basics() {
        assert_eq!(coefficient_of_variation(&[]), 0.0);
        assert_eq!(coefficient_of_variation(&[2.0, 2.0, 2.0]), 0.0);
        let cv = coefficient_of_variation(&[1.0, 3.0]);
        assert!((cv - 0.5).abs() < 1e-12);
    }
}
