//! Non-stroke release planners: glow, dissolve, fade, flip and the
//! one-frame-per-iteration passthrough baseline.
//!
//! Glow and dissolve work on whole pixels: a pixel qualifies when any channel
//! differs by more than `theta`, and all of its channels are released together.
//! Flip is a left-to-right column sweep standing in for a page turn.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::canvas::Canvas;
use crate::config::{DissolveMode, EffectParams};
use crate::error::{Error, Result};
use crate::events::{near_equal_sizes, split_near_equal, ReleasePlan};
use crate::latent::{Coord, Latent};

/// Per-pixel `|Z - D|` summed over channels, row-major.
fn pixel_weights(canvas: &Canvas, snapshot: &Latent) -> Result<Vec<f64>> {
    canvas.z().check_same_shape(snapshot)?;
    let shape = canvas.shape();
    let mut w = vec![0.0f64; shape.plane()];
    for c in 0..shape.channels {
        for ((acc, z), d) in w.iter_mut().zip(canvas.z().channel(c)).zip(snapshot.channel(c)) {
            *acc += (z - d).abs() as f64;
        }
    }
    Ok(w)
}

/// Pixels `(x, y)` where any channel differs by more than `theta`, row-major.
fn qualifying_pixels(canvas: &Canvas, snapshot: &Latent, theta: f32) -> Result<Vec<(usize, usize)>> {
    canvas.z().check_same_shape(snapshot)?;
    let shape = canvas.shape();
    let mut hit = vec![false; shape.plane()];
    for c in 0..shape.channels {
        for ((h, z), d) in hit.iter_mut().zip(canvas.z().channel(c)).zip(snapshot.channel(c)) {
            *h |= (z - d).abs() > theta;
        }
    }
    Ok(hit
        .iter()
        .enumerate()
        .filter(|(_, &h)| h)
        .map(|(i, _)| (i % shape.width, i / shape.width))
        .collect())
}

fn expand_channels(pixels: &[(usize, usize)], channels: usize) -> Vec<Coord> {
    pixels
        .iter()
        .flat_map(|&(x, y)| (0..channels).map(move |c| Coord::new(c, x, y)))
        .collect()
}

fn group_pixels(
    pixels: Vec<(usize, usize)>,
    channels: usize,
    params: &EffectParams,
) -> Vec<Vec<Coord>> {
    let groups = match params.frames_per_iteration {
        Some(k) => split_near_equal(pixels, k),
        None => pixels.chunks(params.chunk_size.max(1)).map(<[_]>::to_vec).collect(),
    };
    groups.iter().map(|g| expand_channels(g, channels)).collect()
}

/// Gap-weighted centroid `(x, y)` of the difference between canvas and snapshot.
pub fn mass_center(canvas: &Canvas, snapshot: &Latent) -> Result<(f64, f64)> {
    let weights = pixel_weights(canvas, snapshot)?;
    let width = canvas.shape().width;
    let (mut sw, mut sx, mut sy) = (0.0f64, 0.0f64, 0.0f64);
    for (i, &w) in weights.iter().enumerate() {
        sw += w;
        sx += w * (i % width) as f64;
        sy += w * (i / width) as f64;
    }
    if sw == 0.0 {
        return Err(Error::NoCenter);
    }
    Ok((sx / sw, sy / sw))
}

/// Qualifying pixels released in rings of growing distance from the mass center.
pub fn glow_plan(
    canvas: &Canvas,
    snapshot: &Latent,
    theta: f32,
    params: &EffectParams,
    iteration: i64,
) -> Result<ReleasePlan> {
    params.validate()?;
    let (cx, cy) = match mass_center(canvas, snapshot) {
        Ok(c) => c,
        Err(Error::NoCenter) => return Ok(ReleasePlan::new(iteration, Vec::new())),
        Err(e) => return Err(e),
    };
    let mut pixels = qualifying_pixels(canvas, snapshot, theta)?;
    let dist2 = |&(x, y): &(usize, usize)| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
    pixels.sort_by(|a, b| dist2(a).total_cmp(&dist2(b)).then((a.1, a.0).cmp(&(b.1, b.0))));
    let frames = group_pixels(pixels, canvas.shape().channels, params);
    Ok(ReleasePlan::new(iteration, frames))
}

/// Qualifying pixels released in random, content-ranked or top-down order.
pub fn dissolve_plan(
    canvas: &Canvas,
    snapshot: &Latent,
    theta: f32,
    params: &EffectParams,
    iteration: i64,
) -> Result<ReleasePlan> {
    params.validate()?;
    let mut pixels = qualifying_pixels(canvas, snapshot, theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    match params.dissolve_mode {
        DissolveMode::Random => pixels.shuffle(&mut rng),
        DissolveMode::Content => {
            let weights = pixel_weights(canvas, snapshot)?;
            let width = canvas.shape().width;
            let gain = |&(x, y): &(usize, usize)| weights[y * width + x];
            // Stable sort keeps row-major order among equal gains.
            pixels.sort_by(|a, b| gain(b).total_cmp(&gain(a)));
        }
        DissolveMode::Vertical => {
            for row in pixels.chunk_by_mut(|a, b| a.1 == b.1) {
                row.shuffle(&mut rng);
            }
        }
    }
    let frames = group_pixels(pixels, canvas.shape().channels, params);
    Ok(ReleasePlan::new(iteration, frames))
}

/// `frames` linear blends from the current canvas to the snapshot; the last one is
/// the snapshot itself.
pub fn fade_plan(canvas: &Canvas, snapshot: &Latent, frames: usize) -> Result<Vec<Latent>> {
    canvas.z().check_same_shape(snapshot)?;
    if frames == 0 {
        return Err(Error::invalid("fade needs at least one frame"));
    }
    let start = canvas.z();
    let mut out = Vec::with_capacity(frames);
    for k in 1..frames {
        let t = k as f64 / frames as f64;
        let data = start
            .as_slice()
            .iter()
            .zip(snapshot.as_slice())
            .map(|(&a, &b)| (a as f64 + t * (b as f64 - a as f64)) as f32)
            .collect();
        out.push(Latent::from_vec(start.shape(), data)?);
    }
    out.push(snapshot.clone());
    Ok(out)
}

/// Columns released left to right in `frames` near-equal bands, regardless of content.
pub fn flip_plan(canvas: &Canvas, snapshot: &Latent, frames: usize, iteration: i64) -> Result<ReleasePlan> {
    canvas.z().check_same_shape(snapshot)?;
    if frames == 0 {
        return Err(Error::invalid("flip needs at least one frame"));
    }
    let shape = canvas.shape();
    let mut x0 = 0;
    let groups = near_equal_sizes(shape.width, frames)
        .into_iter()
        .map(|band| {
            let cols = x0..x0 + band;
            x0 += band;
            let mut coords = Vec::with_capacity(band * shape.height * shape.channels);
            for c in 0..shape.channels {
                for y in 0..shape.height {
                    coords.extend(cols.clone().map(|x| Coord::new(c, x, y)));
                }
            }
            coords
        })
        .collect();
    Ok(ReleasePlan::new(iteration, groups))
}

/// Everything at once: one frame per iteration.
pub fn passthrough_plan(snapshot: &Latent, iteration: i64) -> ReleasePlan {
    let shape = snapshot.shape();
    let mut coords = Vec::with_capacity(shape.len());
    for c in 0..shape.channels {
        for y in 0..shape.height {
            coords.extend((0..shape.width).map(|x| Coord::new(c, x, y)));
        }
    }
    ReleasePlan::new(iteration, vec![coords])
}
