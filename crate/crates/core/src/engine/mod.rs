//! The stroke painter: iteration gating, channel selection, and the greedy
//! per-channel stroke loop with brush move cost.

mod fields;
mod placement;

use rayon::prelude::*;

pub use fields::{info_gain, motivation_field, move_cost_field, stroke_region, Field, Mask};
pub use placement::{pick_stroke_point, Footprint};

use crate::canvas::{abs_diff_sum, Canvas};
use crate::config::PainterConfig;
use crate::error::{Error, Result};
use crate::events::{FlushRecord, LogRecord, StrokeEvent};
use crate::latent::{Latent, LatentTrajectory};
use crate::sink::{FrameSink, NullSink};

use fields::CostTable;
use placement::Placer;

/// Planes at least this large compute the motivation field row-parallel.
const PAR_MIN_CELLS: usize = 128 * 128;

/// Memory of the gating policy across iterations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolicyState {
    /// Largest total gap seen on a qualified iteration.
    pub max_total_gap: f64,
    pub per_channel_max_gap: Vec<f64>,
}

impl PolicyState {
    pub fn new(channels: usize) -> Self {
        PolicyState { max_total_gap: 0.0, per_channel_max_gap: vec![0.0; channels] }
    }
}

/// What happened during one denoising iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: i64,
    pub qualified: bool,
    pub channels_painted: Vec<usize>,
    pub strokes: Vec<StrokeEvent>,
    /// Total gap against the snapshot when the iteration started.
    pub initial_gap: f64,
    /// Total gap left for later iterations to carry.
    pub residual_gap: f64,
}

/// Result of a painting run.
#[derive(Debug, Clone)]
pub struct PaintRun {
    pub reports: Vec<IterationReport>,
    pub records: Vec<LogRecord>,
    pub canvas: Canvas,
}

impl PaintRun {
    pub fn strokes(&self) -> impl Iterator<Item = &StrokeEvent> {
        self.records.iter().filter_map(LogRecord::as_stroke)
    }

    pub fn frame_count(&self) -> u64 {
        self.canvas.frame_counter()
    }
}

/// Whether the total gap exceeds `rho` times the largest gap seen so far.
///
/// Without history any positive gap qualifies; a zero gap never does.
pub fn qualify_iteration(canvas: &Canvas, snapshot: &Latent, policy: &PolicyState, rho: f32) -> Result<bool> {
    let gap = canvas.l1_gap(snapshot, None)?;
    Ok(gap > f64::from(rho) * policy.max_total_gap)
}

fn channel_gaps(canvas: &Canvas, snapshot: &Latent) -> Vec<f64> {
    let z = canvas.z();
    (0..canvas.shape().channels)
        .into_par_iter()
        .map(|c| abs_diff_sum(z.channel(c), snapshot.channel(c)))
        .collect()
}

/// Channels to paint this iteration, most informative first.
///
/// A channel qualifies when its gap beats `rho` times its own largest gap so
/// far and at least one of its cells exceeds `theta`. Every channel's
/// running maximum is updated.
pub fn select_channels(
    canvas: &Canvas,
    snapshot: &Latent,
    policy: &mut PolicyState,
    rho: f32,
    theta: f32,
) -> Result<Vec<usize>> {
    canvas.z().check_same_shape(snapshot)?;
    let channels = canvas.shape().channels;
    if policy.per_channel_max_gap.len() != channels {
        policy.per_channel_max_gap.resize(channels, 0.0);
    }
    let gaps = channel_gaps(canvas, snapshot);
    let z = canvas.z();
    let mut chosen: Vec<usize> = (0..channels)
        .filter(|&c| {
            gaps[c] > f64::from(rho) * policy.per_channel_max_gap[c]
                && z.channel(c)
                    .iter()
                    .zip(snapshot.channel(c))
                    .any(|(a, b)| (a - b).abs() > theta)
        })
        .collect();
    for (m, g) in policy.per_channel_max_gap.iter_mut().zip(&gaps) {
        *m = m.max(*g);
    }
    chosen.sort_by(|&a, &b| gaps[b].total_cmp(&gaps[a]).then(a.cmp(&b)));
    Ok(chosen)
}

/// Copies the snapshot into the canvas over the clipped square footprint of
/// one channel and bumps the heatmap there.
pub fn apply_stroke(
    canvas: &mut Canvas,
    snapshot: &Latent,
    channel: usize,
    (x, y): (usize, usize),
    radius: usize,
) -> Result<Footprint> {
    canvas.z().check_same_shape(snapshot)?;
    let shape = canvas.shape();
    if channel >= shape.channels || x >= shape.width || y >= shape.height {
        return Err(Error::invalid(format!(
            "stroke (c={channel}, x={x}, y={y}) outside {shape} canvas"
        )));
    }
    let fp = Footprint::around(x, y, radius, shape.height, shape.width);
    canvas.release_rect(snapshot, channel, (fp.x0, fp.x1), (fp.y0, fp.y1));
    Ok(fp)
}

/// Groups strokes into frames and forwards finished frames to a sink.
struct FrameClock<'s> {
    strokes_per_frame: usize,
    pending: usize,
    sink: &'s mut dyn FrameSink,
}

impl FrameClock<'_> {
    fn stroke_done(&mut self, canvas: &mut Canvas) -> Result<()> {
        self.pending += 1;
        if self.pending == self.strokes_per_frame {
            self.close(canvas)?;
        }
        Ok(())
    }

    fn close(&mut self, canvas: &mut Canvas) -> Result<()> {
        if self.pending > 0 {
            self.pending = 0;
            self.emit(canvas)?;
        }
        Ok(())
    }

    fn emit(&mut self, canvas: &mut Canvas) -> Result<u64> {
        let index = canvas.advance_frame();
        self.sink.frame(index, canvas)?;
        Ok(index)
    }
}

/// Working buffers for the per-stroke fields of one canvas size.
struct StrokeLoop<'c> {
    config: &'c PainterConfig,
    cost: CostTable,
    placer: Placer,
    motivation: Vec<f32>,
    region: Vec<bool>,
}

impl<'c> StrokeLoop<'c> {
    fn new(config: &'c PainterConfig, height: usize, width: usize) -> Self {
        StrokeLoop {
            config,
            cost: CostTable::new(height, width, config.sigma, config.epsilon, config.cost_mode),
            placer: Placer::default(),
            motivation: vec![0.0; height * width],
            region: vec![false; height * width],
        }
    }

    fn fill_motivation(&mut self, z: &[f32], d: &[f32], width: usize, center: Option<(usize, usize)>) {
        let cost = &self.cost;
        let row = |(y, out): (usize, &mut [f32])| {
            let base = y * width;
            for (x, v) in out.iter_mut().enumerate() {
                let gain = (z[base + x] - d[base + x]).abs();
                *v = match center {
                    Some(c) if !cost.is_flat() => gain * cost.at(c, x, y),
                    _ => gain,
                };
            }
        };
        if self.motivation.len() >= PAR_MIN_CELLS {
            self.motivation.par_chunks_mut(width).enumerate().for_each(row);
        } else {
            self.motivation.chunks_mut(width).enumerate().for_each(row);
        }
    }

    fn paint_channel(
        &mut self,
        canvas: &mut Canvas,
        snapshot: &Latent,
        channel: usize,
        iteration: i64,
        clock: &mut FrameClock<'_>,
    ) -> Result<Vec<StrokeEvent>> {
        let shape = canvas.shape();
        let (h, w) = (shape.height, shape.width);
        let theta = self.config.theta;
        let radius = self.config.radius;

        let mut remaining = 0usize;
        for ((r, z), d) in self
            .region
            .iter_mut()
            .zip(canvas.z().channel(channel))
            .zip(snapshot.channel(channel))
        {
            *r = (z - d).abs() > theta;
            remaining += usize::from(*r);
        }

        let mut events = Vec::new();
        let mut center = None;
        while remaining > 0 {
            if self.config.stroke_cap.is_some_and(|cap| events.len() >= cap) {
                break;
            }
            self.fill_motivation(canvas.z().channel(channel), snapshot.channel(channel), w, center);
            let (x, y) = self
                .placer
                .pick(&self.motivation, &self.region, h, w, radius)
                .expect("region is non-empty");
            let fp = apply_stroke(canvas, snapshot, channel, (x, y), radius)?;
            for (fx, fy) in fp.cells() {
                let r = &mut self.region[fy * w + fx];
                remaining -= usize::from(*r);
                *r = false;
            }
            events.push(StrokeEvent {
                frame_index: canvas.frame_counter(),
                iteration,
                channel,
                center_x: x,
                center_y: y,
                radius,
            });
            clock.stroke_done(canvas)?;
            center = Some((x, y));
        }
        clock.close(canvas)?;
        Ok(events)
    }
}

/// Runs the stroke loop on one channel until its region is exhausted or the
/// stroke cap is hit. Frame indices continue from the canvas frame counter.
pub fn paint_channel(
    canvas: &mut Canvas,
    snapshot: &Latent,
    channel: usize,
    iteration: i64,
    config: &PainterConfig,
) -> Result<Vec<StrokeEvent>> {
    config.validate()?;
    canvas.z().check_same_shape(snapshot)?;
    let shape = canvas.shape();
    if channel >= shape.channels {
        return Err(Error::invalid(format!(
            "channel {channel} out of range for {} channels",
            shape.channels
        )));
    }
    let mut sink = NullSink;
    let mut clock = FrameClock { strokes_per_frame: config.strokes_per_frame, pending: 0, sink: &mut sink };
    StrokeLoop::new(config, shape.height, shape.width).paint_channel(canvas, snapshot, channel, iteration, &mut clock)
}

/// Releases every cell that differs from `snapshot`; emits a frame when anything changed.
pub(crate) fn flush(
    canvas: &mut Canvas,
    snapshot: &Latent,
    iteration: i64,
    sink: &mut dyn FrameSink,
) -> Result<FlushRecord> {
    let coords = canvas.differing_coords(snapshot);
    if coords.is_empty() {
        return Ok(FlushRecord { frame_index: None, iteration });
    }
    canvas.release_coords(snapshot, &coords)?;
    let index = canvas.advance_frame();
    sink.frame(index, canvas)?;
    Ok(FlushRecord { frame_index: Some(index), iteration })
}

/// Paints a whole trajectory from a zero canvas without observing frames.
pub fn paint_trajectory(trajectory: &LatentTrajectory, config: &PainterConfig) -> Result<PaintRun> {
    paint_trajectory_into(trajectory, config, &mut NullSink)
}

/// Paints a whole trajectory from a zero canvas, handing each frame to `sink`.
pub fn paint_trajectory_into(
    trajectory: &LatentTrajectory,
    config: &PainterConfig,
    sink: &mut dyn FrameSink,
) -> Result<PaintRun> {
    let canvas = Canvas::with_shape(trajectory.shape());
    paint_from(canvas, trajectory, 0, Vec::new(), config, sink)
}

/// Paints snapshots `start..` onto an existing canvas. `records` holds log
/// entries already produced for that canvas.
pub(crate) fn paint_from(
    mut canvas: Canvas,
    trajectory: &LatentTrajectory,
    start: usize,
    mut records: Vec<LogRecord>,
    config: &PainterConfig,
    sink: &mut dyn FrameSink,
) -> Result<PaintRun> {
    config.validate()?;
    if canvas.shape() != trajectory.shape() {
        return Err(Error::invalid(format!(
            "canvas {} does not match trajectory {}",
            canvas.shape(),
            trajectory.shape()
        )));
    }
    let shape = canvas.shape();
    let mut policy = PolicyState::new(shape.channels);
    let mut stroke_loop = StrokeLoop::new(config, shape.height, shape.width);
    let mut reports = Vec::with_capacity(trajectory.len() - start);

    for t in start..trajectory.len() {
        let snapshot = trajectory.snapshot(t);
        let iteration = trajectory.iterations()[t];
        let initial_gap = canvas.l1_gap(snapshot, None)?;
        let qualified = initial_gap > f64::from(config.rho) * policy.max_total_gap;
        let mut report = IterationReport {
            iteration,
            qualified,
            channels_painted: Vec::new(),
            strokes: Vec::new(),
            initial_gap,
            residual_gap: initial_gap,
        };
        if qualified {
            policy.max_total_gap = policy.max_total_gap.max(initial_gap);
            let channels = select_channels(&canvas, snapshot, &mut policy, config.rho, config.theta)?;
            let mut clock = FrameClock { strokes_per_frame: config.strokes_per_frame, pending: 0, sink: &mut *sink };
            for &c in &channels {
                let events = stroke_loop.paint_channel(&mut canvas, snapshot, c, iteration, &mut clock)?;
                records.extend(events.iter().copied().map(LogRecord::Stroke));
                report.strokes.extend(events);
            }
            report.channels_painted = channels;
            report.residual_gap = canvas.l1_gap(snapshot, None)?;
        }
        log::debug!(
            "iteration {iteration}: qualified={qualified} strokes={} gap {:.4} -> {:.4}",
            report.strokes.len(),
            report.initial_gap,
            report.residual_gap
        );
        reports.push(report);
    }

    if config.final_flush {
        let t = trajectory.len() - 1;
        let rec = flush(&mut canvas, trajectory.snapshot(t), trajectory.iterations()[t], sink)?;
        records.push(LogRecord::Flush { flush: rec });
    }
    Ok(PaintRun { reports, records, canvas })
}
