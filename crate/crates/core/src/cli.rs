//! Command-line front end: `paint`, `transition`, `replay`, `inspect` and `synth`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::animate::animate;
use crate::canvas::Canvas;
use crate::config::{CostMode, DissolveMode, Effect, PainterConfig};
use crate::error::{Error, Result};
use crate::fixture::{synthetic_trajectory, FixtureSpec};
use crate::io::npy::{self, FrameReader, FrameWriter, Layout};
use crate::io::pgm::{self, ChannelRanges, PgmWriter};
use crate::io::replay::replay_into;
use crate::io::stroke_log::{read_stroke_log, write_stroke_log, LogHeader, StrokeLog};
use crate::latent::{LatentTrajectory, Shape};
use crate::sink::{CountFrames, FrameSink};
use crate::transition::{build_transition_trajectory, interpolate_latents, transition_paint, InterpMode};
use crate::PaintRun;

#[derive(Debug, Parser)]
#[command(name = "latent-brush", version, about = "Paint recorded latent trajectories as stroke animations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Animate one trajectory.
    Paint(PaintArgs),
    /// Animate a transition between two trajectories.
    Transition(TransitionArgs),
    /// Regenerate frames from a stroke log.
    Replay(ReplayArgs),
    /// Print trajectory shape, per-iteration gaps and a gating preview.
    Inspect(InspectArgs),
    /// Write a synthetic fast-converging trajectory.
    Synth(SynthArgs),
}

/// Painter settings; unset flags fall back to `--config`, then to the built-in defaults.
#[derive(Debug, Args, Default)]
struct PainterFlags {
    /// TOML file of `key = value` painter settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Release strategy [default: strokes].
    #[arg(long, value_enum)]
    effect: Option<Effect>,
    /// Stroke qualifying threshold [default: 0.05].
    #[arg(long)]
    theta: Option<f32>,
    /// Gating portion of the largest gap seen [default: 0.1].
    #[arg(long)]
    rho: Option<f32>,
    /// Stroke footprint half-side [default: 2].
    #[arg(long)]
    radius: Option<usize>,
    /// Move-cost Gaussian width [default: 8.0].
    #[arg(long)]
    sigma: Option<f32>,
    /// Move-cost floor [default: 0.25].
    #[arg(long)]
    epsilon: Option<f32>,
    /// Move-cost shape [default: near].
    #[arg(long, value_enum)]
    cost_mode: Option<CostMode>,
    /// Maximum strokes per channel pass [default: unlimited].
    #[arg(long)]
    stroke_cap: Option<usize>,
    /// Strokes grouped into one frame [default: 1].
    #[arg(long)]
    strokes_per_frame: Option<usize>,
    /// Effect frames per iteration [default: chunked for glow/dissolve, 8 for fade/flip].
    #[arg(long = "frames-per-iter")]
    frames_per_iteration: Option<usize>,
    /// Dissolve ordering [default: random].
    #[arg(long, value_enum)]
    dissolve_mode: Option<DissolveMode>,
    /// Pixels per dissolve/glow frame when no frame count is set [default: 64].
    #[arg(long)]
    chunk_size: Option<usize>,
    /// Finish with a full release of the last snapshot [default: true].
    #[arg(long)]
    final_flush: Option<bool>,
    /// Seed for randomized effects [default: 0].
    #[arg(long)]
    seed: Option<u64>,
}

impl PainterFlags {
    fn resolve(&self) -> Result<PainterConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str::<PainterConfig>(&text)
                    .map_err(|e| Error::validation(format!("{}: {e}", path.display())))?
            }
            None => PainterConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        take!(effect, theta, rho, radius, sigma, epsilon, cost_mode, strokes_per_frame, dissolve_mode, chunk_size, final_flush, seed);
        if self.stroke_cap.is_some() {
            cfg.stroke_cap = self.stroke_cap;
        }
        if self.frames_per_iteration.is_some() {
            cfg.frames_per_iteration = self.frames_per_iteration;
        }
        cfg.validate().map_err(|e| Error::validation(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Default)]
struct Outputs {
    /// Frames as an `(F, C, H, W)` f32 NPY file.
    #[arg(long)]
    out_frames: Option<PathBuf>,
    /// Stroke log (JSON Lines).
    #[arg(long)]
    out_log: Option<PathBuf>,
    /// Cumulative stroke heatmap: `.pgm` for an image, anything else for a `(H, W)` u32 NPY.
    #[arg(long)]
    out_heatmap: Option<PathBuf>,
    /// Directory for per-channel PGM previews of every frame (needs --out-frames).
    #[arg(long)]
    out_pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PaintArgs {
    /// Trajectory NPY file.
    trajectory: PathBuf,
    #[arg(long, value_enum, default_value_t = Layout::Tchw)]
    layout: Layout,
    #[command(flatten)]
    painter: PainterFlags,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransitionMode {
    /// Source schedule backwards, then destination schedule forwards.
    Schedules,
    /// Interpolate between the two final latents.
    Interp,
}

#[derive(Debug, Args)]
struct TransitionArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    dst: PathBuf,
    #[arg(long, value_enum, default_value_t = TransitionMode::Schedules)]
    mode: TransitionMode,
    /// Interpolation steps in `interp` mode.
    #[arg(long, default_value_t = 30)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = InterpMode::Linear)]
    interp: InterpMode,
    #[arg(long, value_enum, default_value_t = Layout::Tchw)]
    layout: Layout,
    #[command(flatten)]
    painter: PainterFlags,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    log: PathBuf,
    #[arg(long)]
    traj: PathBuf,
    #[arg(long, value_enum, default_value_t = Layout::Tchw)]
    layout: Layout,
    #[arg(long)]
    out_frames: Option<PathBuf>,
    #[arg(long)]
    out_heatmap: Option<PathBuf>,
    #[arg(long)]
    out_pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    trajectory: PathBuf,
    #[arg(long, value_enum, default_value_t = Layout::Tchw)]
    layout: Layout,
    /// Gating portion used for the preview.
    #[arg(long, default_value_t = 0.1)]
    rho: f32,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 12)]
    steps: usize,
    #[arg(long, default_value_t = 4)]
    channels: usize,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 on I/O
/// failure, 2 on usage or validation errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() { 1 } else { 2 }
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("LP_LOG_LEVEL", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Paint(a) => paint(a),
        Command::Transition(a) => transition(a),
        Command::Replay(a) => replay(a),
        Command::Inspect(a) => inspect(a),
        Command::Synth(a) => synth(a),
    }
}

/// Runs `job` into an optional NPY writer and reports the frame count.
fn with_frame_writer<F>(path: Option<&Path>, shape: Shape, job: F) -> Result<u64>
where
    F: FnOnce(&mut dyn FrameSink) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut w = FrameWriter::create(p, shape)?;
            job(&mut w)?;
            Ok(w.finish()? as u64)
        }
        None => {
            let mut count = CountFrames::default();
            job(&mut count)?;
            Ok(count.0)
        }
    }
}

fn write_heatmap(path: &Path, canvas: &Canvas) -> Result<()> {
    let s = canvas.shape();
    let heat = canvas.heatmap();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        let max = heat.iter().copied().max().unwrap_or(0).max(1) as f64;
        let pixels: Vec<u8> = heat.iter().map(|&h| (h as f64 / max * 255.0).round() as u8).collect();
        pgm::write_pgm(path, s.width, s.height, &pixels)
    } else {
        npy::write_u32(path, &[s.height, s.width], heat)
    }
}

fn write_previews(frames: &Path, dir: &Path) -> Result<()> {
    let reader = FrameReader::open(frames)?;
    let mut ranges = ChannelRanges::new(reader.shape().channels);
    for f in reader {
        ranges.observe(&f?);
    }
    let mut w = PgmWriter::create(dir, ranges)?;
    for f in FrameReader::open(frames)? {
        w.push(&f?)?;
    }
    Ok(())
}

fn finish_outputs(out: &Outputs, run: &PaintRun, shape: Shape, steps: usize, config: &PainterConfig) -> Result<()> {
    if let Some(path) = &out.out_log {
        let log = StrokeLog { header: LogHeader::new(shape, steps, config.clone()), records: run.records.clone() };
        write_stroke_log(&log, path)?;
    }
    if let Some(path) = &out.out_heatmap {
        write_heatmap(path, &run.canvas)?;
    }
    if let Some(dir) = &out.out_pgm {
        let frames = out
            .out_frames
            .as_deref()
            .ok_or_else(|| Error::validation("--out-pgm needs --out-frames"))?;
        write_previews(frames, dir)?;
    }
    Ok(())
}

fn summarize(run: &PaintRun, frames: u64) {
    let qualified = run.reports.iter().filter(|r| r.qualified).count();
    println!(
        "frames: {frames}  strokes: {}  qualified iterations: {qualified}/{}",
        run.strokes().count(),
        run.reports.len()
    );
}

fn paint(a: PaintArgs) -> Result<()> {
    let config = a.painter.resolve()?;
    if a.out.out_pgm.is_some() && a.out.out_frames.is_none() {
        return Err(Error::validation("--out-pgm needs --out-frames"));
    }
    let traj = npy::read_trajectory(&a.trajectory, a.layout)?;
    let mut run = None;
    let frames = with_frame_writer(a.out.out_frames.as_deref(), traj.shape(), |sink| {
        run = Some(animate(&traj, &config, sink)?);
        Ok(())
    })?;
    let run = run.expect("job ran");
    finish_outputs(&a.out, &run, traj.shape(), traj.len(), &config)?;
    summarize(&run, frames);
    Ok(())
}

fn transition(a: TransitionArgs) -> Result<()> {
    let config = a.painter.resolve()?;
    if a.out.out_pgm.is_some() && a.out.out_frames.is_none() {
        return Err(Error::validation("--out-pgm needs --out-frames"));
    }
    let src = npy::read_trajectory(&a.src, a.layout)?;
    let dst = npy::read_trajectory(&a.dst, a.layout)?;
    let traj = match a.mode {
        TransitionMode::Schedules => build_transition_trajectory(&src, &dst),
        TransitionMode::Interp => interpolate_latents(src.last(), dst.last(), a.steps, a.interp),
    }
    .map_err(|e| Error::validation(e.to_string()))?;
    let mut run = None;
    let frames = with_frame_writer(a.out.out_frames.as_deref(), traj.shape(), |sink| {
        run = Some(transition_paint(&traj, &config, sink)?);
        Ok(())
    })?;
    let run = run.expect("job ran");
    finish_outputs(&a.out, &run, traj.shape(), traj.len(), &config)?;
    summarize(&run, frames);
    Ok(())
}

fn replay(a: ReplayArgs) -> Result<()> {
    if a.out_pgm.is_some() && a.out_frames.is_none() {
        return Err(Error::validation("--out-pgm needs --out-frames"));
    }
    let log = read_stroke_log(&a.log)?;
    let traj = npy::read_trajectory(&a.traj, a.layout)?;
    let mut canvas = None;
    let frames = with_frame_writer(a.out_frames.as_deref(), traj.shape(), |sink| {
        canvas = Some(replay_into(&log, &traj, sink)?);
        Ok(())
    })?;
    let canvas = canvas.expect("job ran");
    if let Some(path) = &a.out_heatmap {
        write_heatmap(path, &canvas)?;
    }
    if let (Some(dir), Some(frames)) = (&a.out_pgm, &a.out_frames) {
        write_previews(frames, dir)?;
    }
    println!("frames: {frames}");
    Ok(())
}

fn inspect(a: InspectArgs) -> Result<()> {
    let traj: LatentTrajectory = npy::read_trajectory(&a.trajectory, a.layout)?;
    let s = traj.shape();
    println!("T={} C={} H={} W={}", traj.len(), s.channels, s.height, s.width);
    println!("{:>6} {:>14} {:>14} {:>9}", "iter", "step L1", "pending L1", "qualifies");
    // Preview assumes each qualified iteration is released in full.
    let mut shown = Canvas::with_shape(s);
    let mut previous = Canvas::with_shape(s);
    let mut max_gap = 0.0f64;
    for (t, snap) in traj.snapshots().iter().enumerate() {
        let step = previous.l1_gap(snap, None)?;
        let pending = shown.l1_gap(snap, None)?;
        let qualifies = pending > f64::from(a.rho) * max_gap;
        if qualifies {
            max_gap = max_gap.max(pending);
            shown = Canvas::with_shape(s);
            shown.release_coords(snap, &shown.differing_coords(snap))?;
        }
        previous = Canvas::with_shape(s);
        previous.release_coords(snap, &previous.differing_coords(snap))?;
        println!("{:>6} {:>14.4} {:>14.4} {:>9}", traj.iterations()[t], step, pending, if qualifies { "yes" } else { "no" });
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let shape = Shape::new(a.channels, a.size, a.size).map_err(|e| Error::validation(e.to_string()))?;
    if a.steps == 0 {
        return Err(Error::validation("--steps must be positive"));
    }
    let spec = FixtureSpec { seed: a.seed, ..FixtureSpec::twelve_step() }.with_steps(a.steps).with_shape(shape);
    let traj = synthetic_trajectory(&spec)?;
    npy::write_trajectory(&a.out, &traj)?;
    println!("wrote {} snapshots of {shape} to {}", traj.len(), a.out.display());
    Ok(())
}
