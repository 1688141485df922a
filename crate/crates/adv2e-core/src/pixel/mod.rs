//! The sensor pixel model.
//!
//! A DVS pixel front end is modeled in four stages, each applied per pixel
//! at every over-sampled instant:
//!
//! * logarithmic transformation of linear intensity,
//! * continuity sampling: linear over-sampling between interpolated frames
//!   so the effective rate `K * L * f_b` clears the filter's Nyquist
//!   requirement,
//! * a first-order low-pass filter discretized by impulse invariance,
//!   `Y' = exp(-alpha) * Y + alpha * input`, where `alpha` follows the
//!   brightness-proportional cutoff,
//! * threshold crossing against the per-pixel memorized level, emitting one
//!   event per crossed threshold multiple.
//!
//! Leak and shot noise are folded into the same per-step update; see
//! [`noise`].

pub mod noise;

mod sim;

pub use sim::{combine_bands, simulate, simulate_rows, RowBand, SimResult};

use alloc::vec::Vec;

use crate::config::ValidatedConfig;
use crate::math;
use crate::types::{Event, Frame, Polarity, I_MAX};

/// How the span between one interpolated frame and the next is over-sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SampleBranch {
    /// Bridge from the current frame toward the next one; samples stay
    /// inside the pair's value range.
    #[default]
    Interpolating,
    /// Start at the next frame's value and walk away from the current one.
    /// Produces out-of-range samples; kept only as a compatibility mode for
    /// reproducing other tools' behavior on the last slot of a frame pair.
    Extrapolating,
}

impl SampleBranch {
    #[inline]
    pub(crate) fn sample(self, cur: f64, next: f64, w: f64) -> f64 {
        match self {
            SampleBranch::Interpolating => math::lerp(cur, next, w),
            SampleBranch::Extrapolating => next + (next - cur) * w,
        }
    }
}

/// Errors from [`continuity_sample`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("over-sampling factor must be >= 1, got {0}")]
    InvalidFactor(u32),
    #[error("frames differ in geometry: {0}x{1} vs {2}x{3}")]
    GeometryMismatch(u32, u32, u32, u32),
    #[error("next frame must be later than prev ({next} <= {prev})")]
    NonIncreasingTime { prev: f64, next: f64 },
}

/// Maps linear intensity to the filter's cutoff in rad/s.
///
/// The cutoff scales linearly with brightness and is anchored so that
/// full-scale intensity gives `max_hz`; `floor_ratio` keeps dark pixels
/// from stalling the filter entirely.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffModel {
    pub max_hz: f64,
    pub floor_ratio: f64,
}

impl CutoffModel {
    pub fn new(max_hz: f64, floor_ratio: f64) -> Self {
        CutoffModel { max_hz, floor_ratio }
    }

    pub fn from_config(cfg: &ValidatedConfig) -> Self {
        CutoffModel { max_hz: cfg.cutoff_max, floor_ratio: cfg.cutoff_floor_ratio }
    }

    /// Angular cutoff frequency for a linear intensity in `[0, I_MAX]`.
    /// Out-of-range intensities are clamped.
    #[inline]
    pub fn omega0(&self, intensity: f64) -> f64 {
        let ratio = (intensity / I_MAX).clamp(self.floor_ratio, 1.0);
        core::f64::consts::TAU * self.max_hz * ratio
    }
}

/// `ln(intensity + log_eps)`; finite for zero intensity, monotone in I.
#[inline]
pub fn log_transform_value(intensity: f64, log_eps: f64) -> f64 {
    math::ln(intensity + log_eps)
}

/// Log-transforms every pixel of a linear-intensity frame.
pub fn log_transform(frame: &Frame, log_eps: f64) -> Frame {
    frame.map(|v| log_transform_value(v, log_eps))
}

/// One impulse-invariant filter update: `exp(-alpha) * y + alpha * input`.
///
/// The coefficient is `alpha = omega0 * dt` for the step duration `dt`; the
/// caller keeps `alpha` well below 1 by over-sampling.
#[inline]
pub fn filter_step(y: f64, input: f64, alpha: f64) -> f64 {
    math::exp(-alpha) * y + alpha * input
}

/// Linearly over-samples the span between two frames by `factor`.
///
/// Produces `factor` frames at fractions `k / factor` of the span,
/// starting exactly at `prev`; the end point belongs to the next span.
pub fn continuity_sample(prev: &Frame, next: &Frame, factor: u32) -> Result<Vec<Frame>, SampleError> {
    continuity_sample_with_branch(prev, next, factor, SampleBranch::Interpolating)
}

/// [`continuity_sample`] with an explicit [`SampleBranch`].
pub fn continuity_sample_with_branch(
    prev: &Frame,
    next: &Frame,
    factor: u32,
    branch: SampleBranch,
) -> Result<Vec<Frame>, SampleError> {
    if factor < 1 {
        return Err(SampleError::InvalidFactor(factor));
    }
    if prev.width() != next.width() || prev.height() != next.height() {
        return Err(SampleError::GeometryMismatch(
            prev.width(),
            prev.height(),
            next.width(),
            next.height(),
        ));
    }
    if next.timestamp <= prev.timestamp {
        return Err(SampleError::NonIncreasingTime { prev: prev.timestamp, next: next.timestamp });
    }
    let span = next.timestamp - prev.timestamp;
    let mut out = Vec::with_capacity(factor as usize);
    for k in 0..factor {
        let w = k as f64 / factor as f64;
        let t = prev.timestamp + span * w;
        let data: Vec<f64> = prev
            .data()
            .iter()
            .zip(next.data())
            .map(|(&a, &b)| branch.sample(a, b, w))
            .collect();
        // log-domain samples may be negative, so build without range checks
        out.push(
            Frame::new(prev.width(), prev.height(), t, data)
                .expect("sampled frame inherits validated geometry"),
        );
    }
    Ok(out)
}

/// Per-pixel filter output and memorized log level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelState {
    /// Filtered log-intensity.
    pub y: f64,
    /// Log level at the last triggered event (plus any leak decay).
    pub mem: f64,
}

impl PixelState {
    pub fn new(initial_log: f64) -> Self {
        PixelState { y: initial_log, mem: initial_log }
    }
}

/// Threshold-crossing event generation for one pixel over one step.
///
/// Compares the new filtered value against the memorized level and emits
/// one event per fully crossed threshold multiple, with timestamps placed
/// at the linear crossing points inside `(t_prev, t_now]`. The memorized
/// level advances by exactly the emitted multiples, so sub-threshold
/// residue carries over to later steps.
#[allow(clippy::too_many_arguments)]
pub fn generate_pixel_events(
    state: &mut PixelState,
    filtered: f64,
    x: u16,
    y: u16,
    t_prev: f64,
    t_now: f64,
    pos_threshold: f64,
    neg_threshold: f64,
    out: &mut Vec<Event>,
) {
    let delta = filtered - state.mem;
    let (threshold, polarity, magnitude) = if delta > 0.0 {
        (pos_threshold, Polarity::Pos, delta)
    } else if delta < 0.0 {
        (neg_threshold, Polarity::Neg, -delta)
    } else {
        return;
    };

    let crossings = math::floor(magnitude / threshold);
    if crossings < 1.0 {
        return;
    }
    let count = crossings as u64;
    let span = t_now - t_prev;
    for j in 1..=count {
        let fraction = (j as f64) * threshold / magnitude;
        out.push(Event { x, y, t: t_prev + span * fraction, polarity });
    }
    let advance = crossings * threshold;
    state.mem += match polarity {
        Polarity::Pos => advance,
        Polarity::Neg => -advance,
    };
}

/// Frame-level wrapper over [`generate_pixel_events`]: one state per pixel,
/// row-major, matching the frame layout.
pub fn generate_events(
    filtered: &Frame,
    states: &mut [PixelState],
    t_prev: f64,
    t_now: f64,
    cfg: &ValidatedConfig,
    out: &mut Vec<Event>,
) {
    debug_assert_eq!(states.len(), filtered.data().len());
    let width = filtered.width() as usize;
    for (i, (&value, state)) in filtered.data().iter().zip(states.iter_mut()).enumerate() {
        generate_pixel_events(
            state,
            value,
            (i % width) as u16,
            (i / width) as u16,
            t_prev,
            t_now,
            cfg.pos_threshold,
            cfg.neg_threshold,
            out,
        );
    }
}
