//! Painter tunables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the brush move cost shapes stroke placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    /// Gaussian bump at the last stroke: nearby cells are favoured.
    #[default]
    Near,
    /// One minus the Gaussian bump: distant cells are favoured.
    Far,
    /// Constant ones; placement follows raw gain.
    Off,
}

/// Release strategy applied per denoising iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Effect {
    #[default]
    Strokes,
    Glow,
    Dissolve,
    Fade,
    Flip,
    Passthrough,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DissolveMode {
    /// Seeded uniform shuffle.
    #[default]
    Random,
    /// Largest summed gain first.
    Content,
    /// Top row first, shuffled within each row.
    Vertical,
}

/// Frame count used by fade and flip when no explicit count is configured.
pub const DEFAULT_EFFECT_FRAMES: usize = 8;

/// Parameters shared by the non-stroke release planners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EffectParams {
    /// Frames per iteration; when unset, glow/dissolve chunk by `chunk_size`.
    pub frames_per_iteration: Option<usize>,
    pub dissolve_mode: DissolveMode,
    pub chunk_size: usize,
    pub seed: u64,
}

impl Default for EffectParams {
    fn default() -> Self {
        EffectParams {
            frames_per_iteration: None,
            dissolve_mode: DissolveMode::Random,
            chunk_size: 64,
            seed: 0,
        }
    }
}

impl EffectParams {
    pub fn validate(&self) -> Result<()> {
        if self.frames_per_iteration == Some(0) {
            return Err(Error::invalid("frames per iteration must be at least 1"));
        }
        if self.chunk_size == 0 {
            return Err(Error::invalid("chunk size must be at least 1"));
        }
        Ok(())
    }

    pub fn fixed_frames(&self) -> usize {
        self.frames_per_iteration.unwrap_or(DEFAULT_EFFECT_FRAMES)
    }
}

/// Every tunable of a painting job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PainterConfig {
    /// Stroke qualifying threshold on `|Z - D|`.
    pub theta: f32,
    /// Portion of the largest gap seen so far that an iteration must exceed.
    pub rho: f32,
    /// Half-side of the square stroke footprint.
    pub radius: usize,
    /// Width of the move-cost Gaussian, in latent pixels.
    pub sigma: f32,
    /// Floor of the move-cost field.
    pub epsilon: f32,
    pub cost_mode: CostMode,
    /// Early stop: maximum strokes per channel pass.
    pub stroke_cap: Option<usize>,
    pub strokes_per_frame: usize,
    /// Release every remaining difference at the end so the last frame equals the last snapshot.
    pub final_flush: bool,
    pub seed: u64,
    pub effect: Effect,
    pub frames_per_iteration: Option<usize>,
    pub dissolve_mode: DissolveMode,
    pub chunk_size: usize,
}

impl Default for PainterConfig {
    fn default() -> Self {
        let effect = EffectParams::default();
        PainterConfig {
            theta: 0.05,
            rho: 0.1,
            radius: 2,
            sigma: 8.0,
            epsilon: 0.25,
            cost_mode: CostMode::Near,
            stroke_cap: None,
            strokes_per_frame: 1,
            final_flush: true,
            seed: 0,
            effect: Effect::Strokes,
            frames_per_iteration: effect.frames_per_iteration,
            dissolve_mode: effect.dissolve_mode,
            chunk_size: effect.chunk_size,
        }
    }
}

impl PainterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::invalid(format!("theta must be positive, got {}", self.theta)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        validate_cost(self.sigma, self.epsilon)?;
        if self.stroke_cap == Some(0) {
            return Err(Error::invalid("stroke cap must be positive"));
        }
        if self.strokes_per_frame == 0 {
            return Err(Error::invalid("strokes per frame must be positive"));
        }
        self.effect_params().validate()
    }

    pub fn effect_params(&self) -> EffectParams {
        EffectParams {
            frames_per_iteration: self.frames_per_iteration,
            dissolve_mode: self.dissolve_mode,
            chunk_size: self.chunk_size,
            seed: self.seed,
        }
    }
}

pub(crate) fn validate_cost(sigma: f32, epsilon: f32) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    Ok(())
}
