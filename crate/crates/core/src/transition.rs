//! Image-to-image transitions.
//!
//! Two ways to get a guiding trajectory: replay the source run backwards and the
//! destination run forwards, or interpolate between two final latents (useful
//! when the destination is an edit of the source). Either is then painted like
//! any other trajectory, starting from the first snapshot shown as-is.

use crate::animate::{animate_from_first, Animation};
use crate::config::PainterConfig;
use crate::error::{Error, Result};
use crate::latent::{Latent, LatentTrajectory};
use crate::sink::FrameSink;

/// Interpolation path between two latents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum InterpMode {
    #[default]
    Linear,
    /// Great-circle interpolation of the flattened latents.
    #[value(name = "slerp", alias = "spherical")]
    Spherical,
}

/// Angles below this fall back to linear interpolation.
const SLERP_MIN_ANGLE: f64 = 1e-6;

/// Reversed source snapshots followed by the destination snapshots, renumbered `0..`.
///
/// Only the shapes have to agree; the runs may come from different checkpoints
/// as long as they share a decoder.
pub fn build_transition_trajectory(
    source: &LatentTrajectory,
    destination: &LatentTrajectory,
) -> Result<LatentTrajectory> {
    if source.shape() != destination.shape() {
        return Err(Error::invalid(format!(
            "source {} and destination {} differ in shape",
            source.shape(),
            destination.shape()
        )));
    }
    let snapshots = source
        .snapshots()
        .iter()
        .rev()
        .chain(destination.snapshots())
        .cloned()
        .collect();
    LatentTrajectory::new(snapshots)
}

/// `n` snapshots from `src` to `dst` inclusive.
pub fn interpolate_latents(src: &Latent, dst: &Latent, n: usize, mode: InterpMode) -> Result<LatentTrajectory> {
    src.check_same_shape(dst)?;
    if n < 2 {
        return Err(Error::invalid(format!("interpolation needs at least 2 steps, got {n}")));
    }
    let a = src.as_slice();
    let b = dst.as_slice();
    let weights = match mode {
        InterpMode::Linear => None,
        InterpMode::Spherical => slerp_angle(a, b),
    };
    let mut out = Vec::with_capacity(n);
    out.push(src.clone());
    for k in 1..n - 1 {
        let t = k as f64 / (n - 1) as f64;
        let data: Vec<f32> = match weights {
            Some(omega) => {
                let s = omega.sin();
                let wa = ((1.0 - t) * omega).sin() / s;
                let wb = (t * omega).sin() / s;
                a.iter().zip(b).map(|(&x, &y)| (wa * x as f64 + wb * y as f64) as f32).collect()
            }
            None => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x as f64 + t * (y as f64 - x as f64)) as f32)
                .collect(),
        };
        out.push(Latent::from_vec(src.shape(), data)?);
    }
    out.push(dst.clone());
    LatentTrajectory::new(out)
}

/// Angle between the flattened vectors, or `None` when slerp degenerates.
fn slerp_angle(a: &[f32], b: &[f32]) -> Option<f64> {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let cos = (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0);
    let omega = cos.acos();
    // Antipodal inputs have no unique great circle either.
    (omega >= SLERP_MIN_ANGLE && std::f64::consts::PI - omega >= SLERP_MIN_ANGLE).then_some(omega)
}

/// Paints a transition trajectory: frame 0 shows its first snapshot, the rest
/// is released with the configured effect or strokes.
pub fn transition_paint(
    trajectory: &LatentTrajectory,
    config: &PainterConfig,
    sink: &mut dyn FrameSink,
) -> Result<Animation> {
    animate_from_first(trajectory, config, sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latent::Shape;

    fn lat(vals: &[f32]) -> Latent {
        Latent::from_vec(Shape::new(1, 1, vals.len()).unwrap(), vals.to_vec()).unwrap()
    }

    #[test]
    fn schedule_order() {
        let a: Vec<_> = (0..2).map(|i| lat(&[i as f32])).collect();
        let b: Vec<_> = (0..2).map(|i| lat(&[10.0 + i as f32])).collect();
        let src = LatentTrajectory::with_iterations(a, vec![3, 8]).unwrap();
        let dst = LatentTrajectory::new(b).unwrap();
        let t = build_transition_trajectory(&src, &dst).unwrap();
        let vals: Vec<f32> = t.snapshots().iter().map(|s| s.as_slice()[0]).collect();
        assert_eq!(vals, vec![1.0, 0.0, 10.0, 11.0]);
        assert_eq!(t.iterations(), &[0, 1, 2, 3]);

        let one = LatentTrajectory::new(vec![lat(&[1.0])]).unwrap();
        let two = LatentTrajectory::new(vec![lat(&[2.0])]).unwrap();
        assert_eq!(build_transition_trajectory(&one, &two).unwrap().len(), 2);

        let wide = LatentTrajectory::new(vec![lat(&[1.0, 2.0])]).unwrap();
        assert!(build_transition_trajectory(&one, &wide).is_err());
    }

    #[test]
    fn interpolation_endpoints_and_midpoint() {
        let z0 = lat(&[0.0, 0.0]);
        let z2 = lat(&[2.0, 2.0]);
        let t = interpolate_latents(&z0, &z2, 2, InterpMode::Linear).unwrap();
        assert_eq!(t.snapshots(), &[z0.clone(), z2.clone()]);
        let t = interpolate_latents(&z0, &z2, 3, InterpMode::Linear).unwrap();
        assert_eq!(t.snapshot(1).as_slice(), &[1.0, 1.0]);
        assert!(interpolate_latents(&z0, &z2, 1, InterpMode::Linear).is_err());
    }

    #[test]
    fn slerp_orthonormal_midpoint() {
        let u = lat(&[1.0, 0.0]);
        let v = lat(&[0.0, 1.0]);
        let t = interpolate_latents(&u, &v, 3, InterpMode::Spherical).unwrap();
        let expected = (std::f64::consts::FRAC_PI_4.sin() / std::f64::consts::FRAC_PI_2.sin()) as f32;
        let mid = t.snapshot(1).as_slice();
        assert!((mid[0] - expected).abs() <= f32::EPSILON);
        assert!((mid[1] - expected).abs() <= f32::EPSILON);
    }

    #[test]
    fn slerp_degenerate_inputs_fall_back_to_linear() {
        let zero = lat(&[0.0, 0.0]);
        let v = lat(&[0.0, 4.0]);
        let s = interpolate_latents(&zero, &v, 3, InterpMode::Spherical).unwrap();
        let l = interpolate_latents(&zero, &v, 3, InterpMode::Linear).unwrap();
        assert_eq!(s, l);
        let same = interpolate_latents(&v, &v, 4, InterpMode::Spherical).unwrap();
        assert!(same.snapshots().iter().all(|s| s == &v));
    }
}
