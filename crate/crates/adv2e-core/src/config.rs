//! Simulation configuration and validation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

/// How the log-intensity signal is filtered before thresholding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FilterMode {
    /// No filtering: the threshold stage sees the raw log signal.
    None,
    /// First-order low-pass with a constant cutoff at `cutoff_max`.
    Fixed,
    /// First-order low-pass whose cutoff tracks the instantaneous
    /// brightness, re-evaluated at every over-sampled step.
    #[default]
    Adv2e,
}

/// All simulator tunables.
///
/// Field names double as the JSON configuration keys.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    /// Positive contrast threshold `C_pos` in log-intensity units.
    pub pos_threshold: f64,
    /// Negative contrast threshold `C_neg` in log-intensity units.
    pub neg_threshold: f64,
    /// Inter-frame interpolation factor `L`.
    pub interp_factor: u32,
    /// Continuity over-sampling factor `K` applied after interpolation.
    pub oversample_factor: u32,
    /// Low-pass cutoff in Hz at full-scale brightness.
    pub cutoff_max: f64,
    /// Lower clamp on the brightness-proportional cutoff, as a fraction of
    /// `cutoff_max`; keeps black pixels from freezing the filter.
    pub cutoff_floor_ratio: f64,
    pub filter_mode: FilterMode,
    /// Leak event rate per pixel in Hz.
    pub leak_rate: f64,
    /// Shot noise rate per pixel in Hz at zero intensity.
    pub shot_noise_rate: f64,
    pub rng_seed: u64,
    /// Offset added before the logarithm, `ln(I + log_eps)`.
    pub log_eps: f64,
    /// Compatibility switch: over-sample the last interpolated slot of each
    /// frame pair by extrapolating past the next frame instead of bridging
    /// toward it. Off by default; see `pixel::SampleBranch`.
    pub bridge_extrapolation: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            pos_threshold: 0.2,
            neg_threshold: 0.2,
            interp_factor: 10,
            oversample_factor: 10,
            cutoff_max: 250.0,
            cutoff_floor_ratio: 0.01,
            filter_mode: FilterMode::default(),
            leak_rate: 0.1,
            shot_noise_rate: 0.0,
            rng_seed: 0,
            log_eps: 1.0,
            bridge_extrapolation: false,
        }
    }
}

/// Configuration that failed validation, with every violated constraint.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid config: {}", .violations.join("; "))]
pub struct ConfigError {
    pub violations: Vec<String>,
}

/// Proof that a [`SimConfig`] passed [`SimConfig::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedConfig(SimConfig);

impl Deref for ValidatedConfig {
    type Target = SimConfig;

    fn deref(&self) -> &SimConfig {
        &self.0
    }
}

impl ValidatedConfig {
    pub fn into_inner(self) -> SimConfig {
        self.0
    }

    /// Largest filter coefficient the simulator can produce for frames
    /// spaced `frame_interval` seconds apart.
    pub fn alpha_bound(&self, frame_interval: f64) -> f64 {
        core::f64::consts::TAU * self.cutoff_max * frame_interval
            / ((self.oversample_factor as f64) * (self.interp_factor as f64))
    }
}

impl SimConfig {
    /// Checks every invariant, reporting all violations at once.
    pub fn validate(self) -> Result<ValidatedConfig, ConfigError> {
        let mut violations = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                violations.push(msg);
            }
        };

        check(
            self.pos_threshold > 0.0 && self.pos_threshold.is_finite(),
            format!("C_pos > 0 (pos_threshold = {})", self.pos_threshold),
        );
        check(
            self.neg_threshold > 0.0 && self.neg_threshold.is_finite(),
            format!("C_neg > 0 (neg_threshold = {})", self.neg_threshold),
        );
        check(self.interp_factor >= 1, format!("L >= 1 (interp_factor = {})", self.interp_factor));
        check(
            self.oversample_factor >= 1,
            format!("K >= 1 (oversample_factor = {})", self.oversample_factor),
        );
        check(
            self.cutoff_max > 0.0 && self.cutoff_max.is_finite(),
            format!("f_max > 0 (cutoff_max = {})", self.cutoff_max),
        );
        check(
            self.cutoff_floor_ratio > 0.0 && self.cutoff_floor_ratio <= 1.0,
            format!("0 < cutoff_floor_ratio <= 1 (got {})", self.cutoff_floor_ratio),
        );
        check(
            self.leak_rate >= 0.0 && self.leak_rate.is_finite(),
            format!("leak_rate >= 0 (got {})", self.leak_rate),
        );
        check(
            self.shot_noise_rate >= 0.0 && self.shot_noise_rate.is_finite(),
            format!("shot_noise_rate >= 0 (got {})", self.shot_noise_rate),
        );
        check(
            self.log_eps > 0.0 && self.log_eps.is_finite(),
            format!("log_eps > 0 (got {})", self.log_eps),
        );

        if violations.is_empty() {
            Ok(ValidatedConfig(self))
        } else {
            Err(ConfigError { violations })
        }
    }
}
