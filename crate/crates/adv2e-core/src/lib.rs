//! Core engine for converting intensity frame sequences into DVS event streams.
//!
//! A dynamic vision sensor reports per-pixel log-intensity changes as
//! asynchronous `(x, y, t, polarity)` events instead of full frames. This
//! crate models the analogue front end of such a pixel well enough to
//! synthesize realistic event streams from ordinary video frames:
//!
//! 1. linear inter-frame interpolation ([`frames`]),
//! 2. logarithmic transformation and continuity over-sampling ([`pixel`]),
//! 3. a first-order low-pass filter discretized by impulse invariance, with
//!    a cutoff frequency proportional to the instantaneous brightness,
//! 4. threshold-crossing event generation plus leak and shot noise,
//! 5. temporal-bin (voxel grid) metrics for comparing streams ([`metrics`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); all file formats,
//! parallel drivers, and CLI plumbing live in the companion `adv2e` crate.
//! Everything here is deterministic: a given frame sequence, configuration,
//! and seed always produce the same event stream.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod config;
pub mod frames;
pub mod metrics;
pub mod pixel;
pub mod types;

mod math;

pub use config::{ConfigError, FilterMode, SimConfig, ValidatedConfig};
pub use frames::{FrameSource, SourceError};
pub use pixel::{simulate, simulate_rows, CutoffModel, PixelState, SimResult};
pub use types::{Event, EventStream, Frame, Polarity, I_MAX};
