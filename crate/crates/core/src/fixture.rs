//! Synthetic trajectories that behave like recorded predicted-original latents:
//! a smooth target image whose early estimates are low-contrast and noisy, with
//! both defects decaying geometrically so most of the change lands in the first
//! few steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::latent::{Latent, LatentTrajectory, Shape};

/// Knobs of the synthetic trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureSpec {
    pub steps: usize,
    pub shape: Shape,
    pub seed: u64,
    /// Noise amplitude of the first estimate.
    pub noise: f32,
    /// Per-step decay of noise and contrast loss.
    pub decay: f32,
    /// Contrast deficit of the first estimate, in `[0, 1)`.
    pub washout: f32,
}

impl FixtureSpec {
    /// Twelve 4×64×64 snapshots.
    pub fn twelve_step() -> Self {
        FixtureSpec {
            steps: 12,
            shape: Shape { channels: 4, height: 64, width: 64 },
            seed: 0x5eed,
            noise: 0.35,
            decay: 0.45,
            washout: 0.4,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }
}

/// Sum of a few random plane waves plus white grain, roughly unit variance.
fn smooth_field(shape: Shape, rng: &mut ChaCha8Rng, waves: usize, grain: f32) -> Latent {
    let mut data = Vec::with_capacity(shape.len());
    for _ in 0..shape.channels {
        let params: Vec<(f32, f32, f32, f32)> = (0..waves)
            .map(|_| {
                let amp: f32 = StandardNormal.sample(rng);
                let fx = rng.random_range(-4.0f32..4.0);
                let fy = rng.random_range(-4.0f32..4.0);
                let phase = rng.random_range(0.0f32..std::f32::consts::TAU);
                (amp * (2.0 / waves as f32).sqrt(), fx, fy, phase)
            })
            .collect();
        for y in 0..shape.height {
            for x in 0..shape.width {
                let u = x as f32 / shape.width as f32;
                let v = y as f32 / shape.height as f32;
                let mut s: f32 = params
                    .iter()
                    .map(|&(a, fx, fy, p)| a * (std::f32::consts::TAU * (fx * u + fy * v) + p).cos())
                    .sum();
                let g: f32 = StandardNormal.sample(rng);
                s += grain * g;
                data.push(s);
            }
        }
    }
    Latent::from_vec(shape, data).expect("sized by shape")
}

/// Builds the trajectory described by `spec`.
pub fn synthetic_trajectory(spec: &FixtureSpec) -> Result<LatentTrajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let target = smooth_field(spec.shape, &mut rng, 6, 0.1);
    let mut snapshots = Vec::with_capacity(spec.steps);
    for t in 0..spec.steps {
        let fall = spec.decay.powi(t as i32);
        let noise = smooth_field(spec.shape, &mut rng, 4, 0.3);
        let contrast = 1.0 - spec.washout * fall;
        let data = target
            .as_slice()
            .iter()
            .zip(noise.as_slice())
            .map(|(&f, &n)| contrast * f + spec.noise * fall * n)
            .collect();
        snapshots.push(Latent::from_vec(spec.shape, data)?);
    }
    LatentTrajectory::new(snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_converging() {
        let spec = FixtureSpec::twelve_step();
        let a = synthetic_trajectory(&spec).unwrap();
        assert_eq!(a, synthetic_trajectory(&spec).unwrap());
        assert_eq!(a.len(), 12);
        assert_eq!(a.shape().channels, 4);
        let step = |t: usize| crate::canvas::abs_diff_sum(a.snapshot(t).as_slice(), a.snapshot(t + 1).as_slice());
        assert!(step(0) > 4.0 * step(4));
    }
}
