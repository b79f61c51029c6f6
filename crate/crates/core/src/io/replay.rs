//! Re-applies a stroke log to its trajectory to regenerate the frames.

use crate::canvas::Canvas;
use crate::config::Effect;
use crate::engine::{apply_stroke, flush};
use crate::error::{Error, Result};
use crate::events::LogRecord;
use crate::latent::{Latent, LatentTrajectory};
use crate::sink::{CollectFrames, FrameSink};

use super::stroke_log::StrokeLog;

fn snapshot_for(trajectory: &LatentTrajectory, iteration: i64) -> Result<&Latent> {
    trajectory
        .position_of(iteration)
        .map(|t| trajectory.snapshot(t))
        .ok_or_else(|| Error::validation(format!("log refers to iteration {iteration} missing from the trajectory")))
}

fn close_frame(canvas: &mut Canvas, open: &mut Option<u64>, sink: &mut dyn FrameSink) -> Result<()> {
    if let Some(expected) = open.take() {
        let index = canvas.advance_frame();
        if index != expected {
            return Err(Error::validation(format!("log frame {expected} replays as frame {index}")));
        }
        sink.frame(index, canvas)?;
    }
    Ok(())
}

/// Streams replayed frames into `sink` and returns the final canvas.
pub fn replay_into(log: &StrokeLog, trajectory: &LatentTrajectory, sink: &mut dyn FrameSink) -> Result<Canvas> {
    log.validate()?;
    if log.header.config.effect != Effect::Strokes {
        return Err(Error::validation("only stroke runs can be replayed from a log"));
    }
    if log.header.shape != trajectory.shape() {
        return Err(Error::validation(format!(
            "log was painted on {} but trajectory is {}",
            log.header.shape,
            trajectory.shape()
        )));
    }

    let mut canvas = Canvas::with_shape(trajectory.shape());
    let mut open: Option<u64> = None;
    for rec in &log.records {
        match rec {
            LogRecord::Stroke(e) => {
                if open.is_some_and(|f| f != e.frame_index) {
                    close_frame(&mut canvas, &mut open, sink)?;
                }
                let snapshot = snapshot_for(trajectory, e.iteration)?;
                apply_stroke(&mut canvas, snapshot, e.channel, e.center(), e.radius)
                    .map_err(|err| Error::validation(err.to_string()))?;
                open = Some(e.frame_index);
            }
            LogRecord::Flush { flush: f } => {
                close_frame(&mut canvas, &mut open, sink)?;
                let snapshot = snapshot_for(trajectory, f.iteration)?;
                let done = flush(&mut canvas, snapshot, f.iteration, sink)?;
                if done.frame_index != f.frame_index {
                    return Err(Error::validation(format!(
                        "flush at iteration {} replays as frame {:?}, log says {:?}",
                        f.iteration, done.frame_index, f.frame_index
                    )));
                }
            }
        }
    }
    close_frame(&mut canvas, &mut open, sink)?;
    Ok(canvas)
}

/// Replays a log and returns every frame.
pub fn replay(log: &StrokeLog, trajectory: &LatentTrajectory) -> Result<Vec<Latent>> {
    let mut frames = CollectFrames::default();
    replay_into(log, trajectory, &mut frames)?;
    Ok(frames.frames)
}
