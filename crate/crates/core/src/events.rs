//! Units of animation: stroke events, flush records and release plans.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent::{Coord, Shape};

/// One brush stroke; with the default one stroke per frame it is one animation frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrokeEvent {
    #[serde(rename = "frame")]
    pub frame_index: u64,
    #[serde(rename = "iter")]
    pub iteration: i64,
    pub channel: usize,
    #[serde(rename = "x")]
    pub center_x: usize,
    #[serde(rename = "y")]
    pub center_y: usize,
    pub radius: usize,
}

impl StrokeEvent {
    pub fn center(&self) -> (usize, usize) {
        (self.center_x, self.center_y)
    }
}

/// Full release of every remaining difference against the snapshot of `iteration`.
///
/// `frame_index` is `None` when the canvas already matched and no frame was emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlushRecord {
    #[serde(rename = "frame")]
    pub frame_index: Option<u64>,
    #[serde(rename = "iter")]
    pub iteration: i64,
}

/// An entry of a stroke log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogRecord {
    Flush { flush: FlushRecord },
    Stroke(StrokeEvent),
}

impl LogRecord {
    pub fn frame_index(&self) -> Option<u64> {
        match self {
            LogRecord::Stroke(e) => Some(e.frame_index),
            LogRecord::Flush { flush } => flush.frame_index,
        }
    }

    pub fn as_stroke(&self) -> Option<&StrokeEvent> {
        match self {
            LogRecord::Stroke(e) => Some(e),
            LogRecord::Flush { .. } => None,
        }
    }
}

/// Ordered frame groups of coordinates to copy from the snapshot of `target_iteration`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReleasePlan {
    pub target_iteration: i64,
    pub frames: Vec<Vec<Coord>>,
}

impl ReleasePlan {
    pub fn new(target_iteration: i64, frames: Vec<Vec<Coord>>) -> Self {
        ReleasePlan { target_iteration, frames }
    }

    pub fn is_empty(&self) -> bool {
        self.frames.iter().all(|f| f.is_empty())
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// All coordinates in release order.
    pub fn coords(&self) -> impl Iterator<Item = &Coord> {
        self.frames.iter().flatten()
    }

    /// Checks bounds and pairwise disjointness of the frame groups.
    pub fn validate(&self, shape: Shape) -> Result<()> {
        let mut seen = HashSet::new();
        for c in self.coords() {
            if !shape.contains(*c) {
                return Err(Error::validation(format!("plan coordinate {c:?} outside {shape}")));
            }
            if !seen.insert(*c) {
                return Err(Error::validation(format!("plan releases {c:?} twice")));
            }
        }
        Ok(())
    }
}

/// Splits `n` items into `k` near-equal parts, larger parts first; never yields empty parts.
pub fn near_equal_sizes(n: usize, k: usize) -> Vec<usize> {
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }
    let (base, extra) = (n / k, n % k);
    (0..k).map(|i| base + usize::from(i < extra)).collect()
}

pub(crate) fn split_near_equal<T>(items: Vec<T>, k: usize) -> Vec<Vec<T>> {
    let sizes = near_equal_sizes(items.len(), k);
    let mut it = items.into_iter();
    sizes.into_iter().map(|n| it.by_ref().take(n).collect()).collect()
}
