//! File formats: NPY tensors, JSON Lines stroke logs, PGM previews, and replay.

pub mod npy;
pub mod pgm;
pub mod replay;
pub mod stroke_log;

pub use npy::{read_trajectory, write_frames, Layout};
pub use replay::replay;
pub use stroke_log::{read_stroke_log, write_stroke_log, LogHeader, StrokeLog};
