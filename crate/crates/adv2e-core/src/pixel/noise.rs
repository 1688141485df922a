//! Sensor noise: leak events and shot noise.
//!
//! Leak is modeled as a slow decay of the memorized log level, so spurious
//! positive events fall out of the ordinary threshold stage and interleave
//! with signal events. Each pixel's memorized level starts with a random
//! sub-threshold offset, which spreads leak events uniformly in time across
//! the array instead of firing every pixel in lockstep.
//!
//! Shot noise emits direct ON/OFF events with equal per-polarity
//! probability per step. The configured rate applies at zero intensity and
//! drops linearly to a quarter at full scale, mimicking the quieter
//! behavior of brightly lit pixels.
//!
//! All draws come from a generator keyed per pixel, so the noise stream
//! for a pixel depends only on `(rng_seed, x, y)` and never on how pixels
//! are partitioned across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ValidatedConfig;
use crate::types::{Event, Polarity, I_MAX};

use super::PixelState;

const SEED_TAG: &[u8; 20] = b"adv2e-noise-stream-1";

/// Deterministic per-pixel generator derived from the global seed.
pub fn pixel_rng(seed: u64, x: u16, y: u16) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..10].copy_from_slice(&x.to_le_bytes());
    key[10..12].copy_from_slice(&y.to_le_bytes());
    key[12..32].copy_from_slice(SEED_TAG);
    ChaCha8Rng::from_seed(key)
}

/// Intensity weighting of the shot-noise rate: 1 at black, 0.25 at full
/// scale, linear in between.
#[inline]
pub fn shot_noise_scale(intensity: f64) -> f64 {
    1.0 - 0.75 * (intensity / I_MAX).clamp(0.0, 1.0)
}

/// Random sub-threshold offset applied to `mem` when leak is enabled.
pub(crate) fn leak_phase_offset(rng: &mut ChaCha8Rng, pos_threshold: f64) -> f64 {
    rng.random::<f64>() * pos_threshold
}

/// Decays the memorized level by `C_pos * leak_rate * dt`, priming the
/// threshold stage to emit leak events at `leak_rate` Hz.
#[inline]
pub(crate) fn leak_decay(state: &mut PixelState, pos_threshold: f64, leak_rate: f64, dt: f64) {
    state.mem -= pos_threshold * leak_rate * dt;
}

/// Draws at most one shot-noise event for this pixel and step.
#[inline]
pub(crate) fn shot_event(
    rng: &mut ChaCha8Rng,
    intensity: f64,
    shot_noise_rate: f64,
    dt: f64,
    t: f64,
    x: u16,
    y: u16,
) -> Option<Event> {
    let half = 0.5 * shot_noise_rate * dt * shot_noise_scale(intensity);
    let u = rng.random::<f64>();
    if u < half {
        Some(Event { x, y, t, polarity: Polarity::Pos })
    } else if u < 2.0 * half {
        Some(Event { x, y, t, polarity: Polarity::Neg })
    } else {
        None
    }
}

/// Applies one step of both noise mechanisms to a pixel: decays the
/// memorized level (leak) and possibly emits a direct shot-noise event at
/// the step end.
#[allow(clippy::too_many_arguments)]
pub fn inject_noise(
    state: &mut PixelState,
    rng: &mut ChaCha8Rng,
    intensity: f64,
    dt: f64,
    t_now: f64,
    x: u16,
    y: u16,
    cfg: &ValidatedConfig,
    out: &mut alloc::vec::Vec<Event>,
) {
    if cfg.leak_rate > 0.0 {
        leak_decay(state, cfg.pos_threshold, cfg.leak_rate, dt);
    }
    if cfg.shot_noise_rate > 0.0 {
        if let Some(ev) = shot_event(rng, intensity, cfg.shot_noise_rate, dt, t_now, x, y) {
            out.push(ev);
        }
    }
}
