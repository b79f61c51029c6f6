//! Drives a trajectory through the configured release strategy.

use crate::canvas::Canvas;
use crate::config::{Effect, PainterConfig};
use crate::effects::{dissolve_plan, fade_plan, flip_plan, glow_plan, passthrough_plan};
use crate::engine::{self, IterationReport, PaintRun};
use crate::error::Result;
use crate::events::{LogRecord, ReleasePlan};
use crate::latent::LatentTrajectory;
use crate::sink::FrameSink;

/// Outcome of an animation run; stroke runs fill the log with stroke events,
/// effect runs only with flush records.
pub type Animation = PaintRun;

/// Animates `trajectory` from a zero canvas.
pub fn animate(
    trajectory: &LatentTrajectory,
    config: &PainterConfig,
    sink: &mut dyn FrameSink,
) -> Result<Animation> {
    let canvas = Canvas::with_shape(trajectory.shape());
    animate_from(canvas, trajectory, 0, Vec::new(), config, sink)
}

/// Shows the first snapshot as frame 0, then animates the rest of the trajectory.
pub fn animate_from_first(
    trajectory: &LatentTrajectory,
    config: &PainterConfig,
    sink: &mut dyn FrameSink,
) -> Result<Animation> {
    config.validate()?;
    let mut canvas = Canvas::with_shape(trajectory.shape());
    let first = engine::flush(&mut canvas, trajectory.snapshot(0), trajectory.iterations()[0], sink)?;
    animate_from(canvas, trajectory, 1, vec![LogRecord::Flush { flush: first }], config, sink)
}

fn animate_from(
    canvas: Canvas,
    trajectory: &LatentTrajectory,
    start: usize,
    records: Vec<LogRecord>,
    config: &PainterConfig,
    sink: &mut dyn FrameSink,
) -> Result<Animation> {
    if config.effect == Effect::Strokes {
        engine::paint_from(canvas, trajectory, start, records, config, sink)
    } else {
        run_effect(canvas, trajectory, start, records, config, sink)
    }
}

/// Mixes the base seed with an iteration id so each iteration shuffles differently.
pub fn iteration_seed(seed: u64, iteration: i64) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    h ^= (iteration as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    h = h.rotate_left(27) ^ (h >> 33);
    h = h.wrapping_mul(0x1656_67B1_9E37_79F9);
    h ^ (h >> 29)
}

fn apply_plan(canvas: &mut Canvas, plan: &ReleasePlan, snapshot: &crate::Latent, sink: &mut dyn FrameSink) -> Result<()> {
    for frame in plan.frames.iter().filter(|f| !f.is_empty()) {
        canvas.release_coords(snapshot, frame)?;
        let index = canvas.advance_frame();
        sink.frame(index, canvas)?;
    }
    Ok(())
}

fn run_effect(
    mut canvas: Canvas,
    trajectory: &LatentTrajectory,
    start: usize,
    mut records: Vec<LogRecord>,
    config: &PainterConfig,
    sink: &mut dyn FrameSink,
) -> Result<Animation> {
    config.validate()?;
    let params = config.effect_params();
    let mut max_gap = 0.0f64;
    let mut reports = Vec::new();

    for t in start..trajectory.len() {
        let snapshot = trajectory.snapshot(t);
        let iteration = trajectory.iterations()[t];
        let initial_gap = canvas.l1_gap(snapshot, None)?;
        let mut qualified = true;
        match config.effect {
            Effect::Passthrough => apply_plan(&mut canvas, &passthrough_plan(snapshot, iteration), snapshot, sink)?,
            Effect::Flip => {
                let plan = flip_plan(&canvas, snapshot, params.fixed_frames(), iteration)?;
                apply_plan(&mut canvas, &plan, snapshot, sink)?;
            }
            Effect::Fade => {
                let mut frames = fade_plan(&canvas, snapshot, params.fixed_frames())?;
                frames.pop();
                for blend in frames {
                    canvas.set_z(blend);
                    let index = canvas.advance_frame();
                    sink.frame(index, &canvas)?;
                }
                apply_plan(&mut canvas, &passthrough_plan(snapshot, iteration), snapshot, sink)?;
            }
            Effect::Glow | Effect::Dissolve => {
                qualified = initial_gap > f64::from(config.rho) * max_gap;
                if qualified {
                    max_gap = max_gap.max(initial_gap);
                    let plan = if config.effect == Effect::Glow {
                        glow_plan(&canvas, snapshot, config.theta, &params, iteration)?
                    } else {
                        let mut p = params;
                        p.seed = iteration_seed(params.seed, iteration);
                        dissolve_plan(&canvas, snapshot, config.theta, &p, iteration)?
                    };
                    apply_plan(&mut canvas, &plan, snapshot, sink)?;
                }
            }
            Effect::Strokes => unreachable!("strokes are painted by the engine"),
        }
        reports.push(IterationReport {
            iteration,
            qualified,
            channels_painted: Vec::new(),
            strokes: Vec::new(),
            initial_gap,
            residual_gap: canvas.l1_gap(snapshot, None)?,
        });
    }

    if config.final_flush {
        let t = trajectory.len() - 1;
        let rec = engine::flush(&mut canvas, trajectory.snapshot(t), trajectory.iterations()[t], sink)?;
        records.push(LogRecord::Flush { flush: rec });
    }
    Ok(PaintRun { reports, records, canvas })
}
