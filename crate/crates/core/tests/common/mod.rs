//! Brute-force reference implementations and random inputs shared by the
//! integration tests. Everything here works on plain vectors with explicit
//! index loops so it shares no code paths with the library.
#![allow(dead_code)]

use latent_brush::{CostMode, Latent, LatentTrajectory, PainterConfig, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn idx(h: usize, w: usize, c: usize, x: usize, y: usize) -> usize {
    (c * h + y) * w + x
}

pub fn l1(a: &[f32], b: &[f32]) -> f64 {
    let mut s = 0.0f64;
    for i in 0..a.len() {
        s += (a[i] - b[i]).abs() as f64;
    }
    s
}

pub fn cost(dx: usize, dy: usize, sigma: f32, eps: f32, mode: CostMode) -> f32 {
    let d2 = (dx * dx + dy * dy) as f32;
    let bump = (-d2 / (2.0 * sigma * sigma)).exp();
    match mode {
        CostMode::Near => eps + (1.0 - eps) * bump,
        CostMode::Far => 1.0 - (1.0 - eps) * bump,
        CostMode::Off => 1.0,
    }
}

/// Clipped square sum, rows top to bottom, accumulated in f64.
pub fn box_sum(v: &[f32], h: usize, w: usize, x: usize, y: usize, r: usize) -> f64 {
    let mut s = 0.0f64;
    for yy in 0..h {
        for xx in 0..w {
            if yy.abs_diff(y) <= r && xx.abs_diff(x) <= r {
                s += v[yy * w + xx] as f64;
            }
        }
    }
    s
}

/// Exhaustive argmax over region cells; first strict maximum in row-major order.
pub fn argmax_box(v: &[f32], region: &[bool], h: usize, w: usize, r: usize) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for y in 0..h {
        for x in 0..w {
            if !region[y * w + x] {
                continue;
            }
            let s = box_sum(v, h, w, x, y, r);
            if best.is_none_or(|(b, _, _)| s > b) {
                best = Some((s, x, y));
            }
        }
    }
    best.map(|(_, x, y)| (x, y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleStroke {
    pub frame: u64,
    pub iter: i64,
    pub channel: usize,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub strokes: Vec<OracleStroke>,
    pub frames: Vec<Vec<f32>>,
    pub z: Vec<f32>,
    pub heat: Vec<u32>,
}

/// Paints one channel with fields re-derived from scratch before every stroke.
#[allow(clippy::too_many_arguments)]
pub fn oracle_channel(
    z: &mut [f32],
    d: &[f32],
    heat: &mut [u32],
    (h, w): (usize, usize),
    c: usize,
    cfg: &PainterConfig,
    mut on_stroke: impl FnMut(usize, usize, &[f32]),
) -> usize {
    let mut region = vec![false; h * w];
    for y in 0..h {
        for x in 0..w {
            let i = idx(h, w, c, x, y);
            region[y * w + x] = (z[i] - d[i]).abs() > cfg.theta;
        }
    }
    let mut last: Option<(usize, usize)> = None;
    let mut count = 0;
    while region.iter().any(|&r| r) {
        if cfg.stroke_cap.is_some_and(|cap| count >= cap) {
            break;
        }
        let mut v = vec![0.0f32; h * w];
        for y in 0..h {
            for x in 0..w {
                let i = idx(h, w, c, x, y);
                let g = (z[i] - d[i]).abs();
                let m = match last {
                    Some((cx, cy)) => cost(x.abs_diff(cx), y.abs_diff(cy), cfg.sigma, cfg.epsilon, cfg.cost_mode),
                    None => 1.0,
                };
                v[y * w + x] = g * m;
            }
        }
        let (sx, sy) = argmax_box(&v, &region, h, w, cfg.radius).unwrap();
        for y in 0..h {
            for x in 0..w {
                if y.abs_diff(sy) <= cfg.radius && x.abs_diff(sx) <= cfg.radius {
                    let i = idx(h, w, c, x, y);
                    z[i] = d[i];
                    heat[y * w + x] += 1;
                    region[y * w + x] = false;
                }
            }
        }
        count += 1;
        last = Some((sx, sy));
        on_stroke(sx, sy, z);
    }
    count
}

/// Reference engine for a whole trajectory in strokes mode.
pub fn oracle_paint(shape: Shape, snaps: &[Vec<f32>], iters: &[i64], cfg: &PainterConfig) -> OracleRun {
    let (cn, h, w) = (shape.channels, shape.height, shape.width);
    let plane = h * w;
    let mut z = vec![0.0f32; cn * plane];
    let mut heat = vec![0u32; plane];
    let mut frames = Vec::new();
    let mut strokes = Vec::new();
    let mut max_total = 0.0f64;
    let mut max_chan = vec![0.0f64; cn];

    for (t, d) in snaps.iter().enumerate() {
        let gap = l1(&z, d);
        if gap <= cfg.rho as f64 * max_total {
            continue;
        }
        max_total = max_total.max(gap);
        let mut picked = Vec::new();
        let mut gaps = vec![0.0f64; cn];
        for c in 0..cn {
            gaps[c] = l1(&z[c * plane..(c + 1) * plane], &d[c * plane..(c + 1) * plane]);
            let mut any = false;
            for i in c * plane..(c + 1) * plane {
                any |= (z[i] - d[i]).abs() > cfg.theta;
            }
            if gaps[c] > cfg.rho as f64 * max_chan[c] && any {
                picked.push(c);
            }
        }
        for c in 0..cn {
            max_chan[c] = max_chan[c].max(gaps[c]);
        }
        // Selection sort: larger gap first, lower index on ties.
        let mut order = Vec::new();
        while !picked.is_empty() {
            let mut k = 0;
            for j in 1..picked.len() {
                let (a, b) = (picked[j], picked[k]);
                if gaps[a] > gaps[b] || (gaps[a] == gaps[b] && a < b) {
                    k = j;
                }
            }
            order.push(picked.remove(k));
        }
        for c in order {
            let mut pending = 0;
            let mut local = Vec::new();
            oracle_channel(&mut z, d, &mut heat, (h, w), c, cfg, |x, y, zz| {
                local.push((x, y, frames.len() as u64));
                pending += 1;
                if pending == cfg.strokes_per_frame {
                    frames.push(zz.to_vec());
                    pending = 0;
                }
            });
            if pending > 0 {
                frames.push(z.clone());
            }
            for (x, y, frame) in local {
                strokes.push(OracleStroke { frame, iter: iters[t], channel: c, x, y });
            }
        }
    }
    if cfg.final_flush {
        let d = snaps.last().unwrap();
        let mut changed = false;
        for c in 0..cn {
            for y in 0..h {
                for x in 0..w {
                    let i = idx(h, w, c, x, y);
                    if z[i].to_bits() != d[i].to_bits() {
                        z[i] = d[i];
                        heat[y * w + x] += 1;
                        changed = true;
                    }
                }
            }
        }
        if changed {
            frames.push(z.clone());
        }
    }
    OracleRun { strokes, frames, z, heat }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A converging trajectory; roughly a third of the time values are
/// quantized so that exact ties between candidate strokes occur.
pub fn random_trajectory(rng: &mut impl Rng, shape: Shape, steps: usize) -> LatentTrajectory {
    let quantize = rng.random_bool(0.35);
    let n = shape.len();
    let target: Vec<f32> = (0..n).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    let mut snaps = Vec::with_capacity(steps);
    for t in 0..steps {
        let scale = 0.8f32.powi(t as i32 * 2);
        let data: Vec<f32> = target
            .iter()
            .map(|&v| {
                let x = v + scale * rng.random_range(-1.0f32..1.0);
                if quantize { (x * 4.0).round() / 4.0 } else { x }
            })
            .collect();
        snaps.push(Latent::from_vec(shape, data).unwrap());
    }
    LatentTrajectory::new(snaps).unwrap()
}

pub fn random_config(rng: &mut impl Rng) -> PainterConfig {
    let modes = [CostMode::Near, CostMode::Far, CostMode::Off];
    PainterConfig {
        theta: [0.01, 0.05, 0.2, 0.5][rng.random_range(0..4)],
        rho: [0.0, 0.1, 0.5][rng.random_range(0..3)],
        radius: rng.random_range(0..=2),
        sigma: rng.random_range(0.5f32..10.0),
        epsilon: rng.random_range(0.01f32..=1.0),
        cost_mode: modes[rng.random_range(0..3)],
        stroke_cap: if rng.random_bool(0.2) { Some(rng.random_range(1..6)) } else { None },
        strokes_per_frame: rng.random_range(1..=3),
        final_flush: rng.random_bool(0.8),
        ..PainterConfig::default()
    }
}

pub fn random_shape(rng: &mut impl Rng) -> Shape {
    Shape::new(rng.random_range(1..=2), rng.random_range(1..=16), rng.random_range(1..=16)).unwrap()
}

pub fn snapshots_of(traj: &LatentTrajectory) -> Vec<Vec<f32>> {
    traj.snapshots().iter().map(|s| s.as_slice().to_vec()).collect()
}
