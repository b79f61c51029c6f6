//! Replays recorded latent-diffusion trajectories as painting animations.
//!
//! A trajectory is the sequence of per-step predicted-original latents of one
//! generation run. The painter keeps its own latent canvas, starting at zero,
//! and releases each snapshot's new information into it as localized brush
//! strokes (or as one of several release effects), spreading each denoising
//! step over many animation frames.

pub mod animate;
pub mod canvas;
pub mod cli;
pub mod config;
pub mod effects;
pub mod engine;
pub mod error;
pub mod events;
pub mod fixture;
pub mod io;
pub mod latent;
pub mod sink;
pub mod transition;

pub use animate::{animate, Animation};
pub use canvas::Canvas;
pub use config::{CostMode, DissolveMode, Effect, EffectParams, PainterConfig};
pub use engine::{paint_trajectory, IterationReport, PaintRun, PolicyState};
pub use error::{Error, Result};
pub use events::{FlushRecord, LogRecord, ReleasePlan, StrokeEvent};
pub use latent::{Coord, Latent, LatentTrajectory, Shape};
pub use sink::FrameSink;
