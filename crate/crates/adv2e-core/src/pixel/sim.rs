//! Full simulation pipeline: frame pairs -> interpolation -> log ->
//! continuity samples -> filter -> threshold/noise -> events.
//!
//! The engine never materializes intermediate frame sequences. For each
//! adjacent frame pair it walks the interpolation slots, and within each
//! slot the over-sampled instants, updating every pixel in the band per
//! instant. Per-pixel arithmetic is identical no matter how rows are split
//! into bands, which is what makes multi-threaded runs reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::mem;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;

use crate::config::{FilterMode, ValidatedConfig};
use crate::frames::FrameSource;
use crate::math::lerp;
use crate::types::{Event, EventStream, Frame};

use super::noise;
use super::{filter_step, generate_pixel_events, log_transform_value, CutoffModel, PixelState, SampleBranch};

/// Outcome of simulating a horizontal band of rows.
#[derive(Clone, Debug)]
pub struct RowBand {
    pub rows: Range<u32>,
    /// Events in emission order (unsorted).
    pub events: Vec<Event>,
    /// Final per-pixel states, row-major within the band.
    pub states: Vec<PixelState>,
    pub max_alpha: f64,
    /// Filter updates whose coefficient exceeded 1, where the
    /// impulse-invariant update stops being a faithful low-pass.
    pub alpha_warnings: u64,
}

/// Outcome of a full simulation run.
#[derive(Clone, Debug)]
pub struct SimResult {
    pub stream: EventStream,
    /// Final per-pixel states, row-major over the full sensor.
    pub final_states: Vec<PixelState>,
    pub max_alpha: f64,
    pub alpha_warnings: u64,
}

fn band_slice<'f>(frame: &'f Frame, rows: &Range<u32>) -> &'f [f64] {
    let width = frame.width() as usize;
    &frame.data()[rows.start as usize * width..rows.end as usize * width]
}

struct BandEngine<'a> {
    cfg: &'a ValidatedConfig,
    cutoff: CutoffModel,
    width: usize,
    row0: u32,
    leak_on: bool,
    shot_on: bool,
    states: Vec<PixelState>,
    rngs: Vec<ChaCha8Rng>,
    events: Vec<Event>,
    max_alpha: f64,
    alpha_warnings: u64,
    t_prev: f64,
}

impl<'a> BandEngine<'a> {
    fn new(cfg: &'a ValidatedConfig, rows: &Range<u32>, width: usize, init_log: &[f64], t0: f64) -> Self {
        let band_px = init_log.len();
        let leak_on = cfg.leak_rate > 0.0;
        let shot_on = cfg.shot_noise_rate > 0.0;

        let mut states = Vec::with_capacity(band_px);
        for &v in init_log {
            states.push(PixelState::new(v));
        }

        let mut rngs = Vec::new();
        if leak_on || shot_on {
            rngs.reserve_exact(band_px);
            for (i, state) in states.iter_mut().enumerate() {
                let x = (i % width) as u16;
                let y = (rows.start + (i / width) as u32) as u16;
                let mut rng = noise::pixel_rng(cfg.rng_seed, x, y);
                if leak_on {
                    // random sub-threshold phase so leak events do not fire
                    // across the whole array in lockstep
                    state.mem -= noise::leak_phase_offset(&mut rng, cfg.pos_threshold);
                }
                rngs.push(rng);
            }
        }

        BandEngine {
            cfg,
            cutoff: CutoffModel::from_config(cfg),
            width,
            row0: rows.start,
            leak_on,
            shot_on,
            states,
            rngs,
            events: Vec::new(),
            max_alpha: 0.0,
            alpha_warnings: 0,
            t_prev: t0,
        }
    }

    /// Advances every pixel of the band to the sample at `t_now`.
    /// `values(i)` yields the (log, linear) sample pair for band index `i`.
    fn step(&mut self, t_now: f64, values: impl Fn(usize) -> (f64, f64)) {
        let dt = t_now - self.t_prev;
        let mode = self.cfg.filter_mode;
        let fixed_alpha = core::f64::consts::TAU * self.cfg.cutoff_max * dt;
        if mode == FilterMode::Fixed {
            if fixed_alpha > self.max_alpha {
                self.max_alpha = fixed_alpha;
            }
            if fixed_alpha > 1.0 {
                self.alpha_warnings += self.states.len() as u64;
            }
        }

        for (i, state) in self.states.iter_mut().enumerate() {
            let (v_log, v_lin) = values(i);
            state.y = match mode {
                FilterMode::None => v_log,
                FilterMode::Fixed => filter_step(state.y, v_log, fixed_alpha),
                FilterMode::Adv2e => {
                    let alpha = self.cutoff.omega0(v_lin) * dt;
                    if alpha > self.max_alpha {
                        self.max_alpha = alpha;
                    }
                    if alpha > 1.0 {
                        self.alpha_warnings += 1;
                    }
                    filter_step(state.y, v_log, alpha)
                }
            };

            if self.leak_on {
                noise::leak_decay(state, self.cfg.pos_threshold, self.cfg.leak_rate, dt);
            }

            let x = (i % self.width) as u16;
            let y = (self.row0 + (i / self.width) as u32) as u16;
            let filtered = state.y;
            generate_pixel_events(
                state,
                filtered,
                x,
                y,
                self.t_prev,
                t_now,
                self.cfg.pos_threshold,
                self.cfg.neg_threshold,
                &mut self.events,
            );

            if self.shot_on {
                if let Some(ev) = noise::shot_event(
                    &mut self.rngs[i],
                    v_lin,
                    self.cfg.shot_noise_rate,
                    dt,
                    t_now,
                    x,
                    y,
                ) {
                    self.events.push(ev);
                }
            }
        }

        self.t_prev = t_now;
    }
}

/// Simulates a horizontal band of sensor rows.
///
/// Bands are independent: running several bands and merging them with
/// [`combine_bands`] produces exactly the same stream as a single
/// full-height run.
pub fn simulate_rows(src: &FrameSource, cfg: &ValidatedConfig, rows: Range<u32>) -> RowBand {
    assert!(
        rows.start < rows.end && rows.end <= src.height(),
        "row band {rows:?} out of range for height {}",
        src.height()
    );
    let width = src.width() as usize;
    let band_px = (rows.end - rows.start) as usize * width;
    let l_total = cfg.interp_factor as usize;
    let k_total = cfg.oversample_factor as usize;
    let eps = cfg.log_eps;

    let frames = src.frames();

    // values at the bracketing interpolation slots, per band pixel
    let mut cur_lin = vec![0.0f64; band_px];
    let mut cur_log = vec![0.0f64; band_px];
    let mut next_lin = vec![0.0f64; band_px];
    let mut next_log = vec![0.0f64; band_px];

    for (i, &v) in band_slice(&frames[0], &rows).iter().enumerate() {
        cur_lin[i] = v;
        cur_log[i] = log_transform_value(v, eps);
    }

    // the first sample initializes the pixel states and emits nothing
    let mut engine = BandEngine::new(cfg, &rows, width, &cur_log, frames[0].timestamp);

    for n in 0..frames.len() - 1 {
        let fa = &frames[n];
        let fb = &frames[n + 1];
        let gap = fb.timestamp - fa.timestamp;
        let band_a = band_slice(fa, &rows);
        let band_b = band_slice(fb, &rows);

        for l in 0..l_total {
            // slot timestamps use the same expressions as the materialized
            // interpolation path, keeping both routes bit-identical
            let t_cur = fa.timestamp + gap * (l as f64 / l_total as f64);
            let t_next = if l + 1 == l_total {
                // the next slot is the next input frame, bit-exact
                for (i, &b) in band_b.iter().enumerate() {
                    next_lin[i] = b;
                    next_log[i] = log_transform_value(b, eps);
                }
                fb.timestamp
            } else {
                let w = (l + 1) as f64 / l_total as f64;
                for (i, (&a, &b)) in band_a.iter().zip(band_b).enumerate() {
                    let v = lerp(a, b, w);
                    next_lin[i] = v;
                    next_log[i] = log_transform_value(v, eps);
                }
                fa.timestamp + gap * w
            };
            let span = t_next - t_cur;

            let branch = if cfg.bridge_extrapolation && l + 1 == l_total {
                SampleBranch::Extrapolating
            } else {
                SampleBranch::Interpolating
            };

            let k_start = usize::from(n == 0 && l == 0);
            for k in k_start..k_total {
                let w = k as f64 / k_total as f64;
                let t_now = t_cur + span * w;
                engine.step(t_now, |i| {
                    (
                        branch.sample(cur_log[i], next_log[i], w),
                        branch.sample(cur_lin[i], next_lin[i], w),
                    )
                });
            }

            mem::swap(&mut cur_lin, &mut next_lin);
            mem::swap(&mut cur_log, &mut next_log);
        }
    }

    // terminal sample: the last input frame at its own timestamp
    engine.step(frames[frames.len() - 1].timestamp, |i| (cur_log[i], cur_lin[i]));

    RowBand {
        rows,
        events: engine.events,
        states: engine.states,
        max_alpha: engine.max_alpha,
        alpha_warnings: engine.alpha_warnings,
    }
}

/// Merges per-band outcomes into a canonical stream.
///
/// Bands must be contiguous, ascending, and cover every sensor row.
/// Panics otherwise: a bad partition is a driver bug, not an input error.
pub fn combine_bands(src: &FrameSource, bands: Vec<RowBand>) -> SimResult {
    let mut expected = 0u32;
    let mut events = Vec::with_capacity(bands.iter().map(|b| b.events.len()).sum());
    let mut final_states = Vec::with_capacity((src.width() as usize) * (src.height() as usize));
    let mut max_alpha = 0.0f64;
    let mut alpha_warnings = 0u64;

    for band in bands {
        assert_eq!(band.rows.start, expected, "bands must be contiguous and ascending");
        expected = band.rows.end;
        events.extend(band.events);
        final_states.extend(band.states);
        if band.max_alpha > max_alpha {
            max_alpha = band.max_alpha;
        }
        alpha_warnings += band.alpha_warnings;
    }
    assert_eq!(expected, src.height(), "bands must cover the whole sensor");

    let stream = EventStream::from_events(src.width(), src.height(), events)
        .expect("simulator emitted an invalid event");

    SimResult { stream, final_states, max_alpha, alpha_warnings }
}

/// Runs the full pipeline single-threaded over the whole sensor.
pub fn simulate(src: &FrameSource, cfg: &ValidatedConfig) -> SimResult {
    let band = simulate_rows(src, cfg, 0..src.height());
    combine_bands(src, vec![band])
}

#[cfg(test)]
mod tests {
    use super::super::continuity_sample;
    use super::*;
    use crate::config::SimConfig;
    use crate::types::Polarity;

    fn source(frames: &[(f64, Vec<f64>)], width: u32, height: u32) -> FrameSource {
        FrameSource::new(
            frames
                .iter()
                .map(|(t, data)| Frame::new(width, height, *t, data.clone()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn quiet(mode: FilterMode) -> ValidatedConfig {
        SimConfig {
            filter_mode: mode,
            leak_rate: 0.0,
            shot_noise_rate: 0.0,
            ..SimConfig::default()
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn constant_video_emits_nothing() {
        // The impulse-invariant update has DC gain alpha/(1 - exp(-alpha)),
        // so a constant scene is only silent when alpha stays small; sample
        // densely enough that the residual drift stays below threshold.
        let src = source(
            &[(0.0, vec![20.0; 6]), (0.01, vec![20.0; 6]), (0.02, vec![20.0; 6])],
            3,
            2,
        );
        for mode in [FilterMode::None, FilterMode::Fixed, FilterMode::Adv2e] {
            let cfg = SimConfig {
                filter_mode: mode,
                oversample_factor: 20,
                leak_rate: 0.0,
                shot_noise_rate: 0.0,
                ..SimConfig::default()
            }
            .validate()
            .unwrap();
            let result = simulate(&src, &cfg);
            assert!(result.stream.is_empty(), "mode {mode:?}");
        }
    }

    #[test]
    fn events_persist_after_step_in_adv2e_mode_only() {
        // single pixel, sharp upward step at t = 2 ms, input constant after
        let clip: Vec<(f64, Vec<f64>)> = (0..=10)
            .map(|n| (n as f64 * 1e-3, vec![if n < 2 { 0.0 } else { 255.0 }]))
            .collect();
        let src = source(&clip, 1, 1);
        let step_settled = 2e-3;

        let cfg = SimConfig {
            interp_factor: 1,
            oversample_factor: 10,
            leak_rate: 0.0,
            shot_noise_rate: 0.0,
            filter_mode: FilterMode::Adv2e,
            ..SimConfig::default()
        };

        let adv = simulate(&src, &cfg.clone().validate().unwrap());
        let after: Vec<f64> = adv
            .stream
            .events()
            .iter()
            .map(|e| e.t)
            .filter(|&t| t > step_settled + 1e-12)
            .collect();
        assert!(after.len() >= 3, "filter lag should keep emitting, got {after:?}");
        let last = adv.stream.last_timestamp().unwrap();
        let omega_full = core::f64::consts::TAU * 250.0;
        assert!(last > step_settled && last < step_settled + 20.0 / omega_full);

        let none = simulate(
            &src,
            &SimConfig { filter_mode: FilterMode::None, ..cfg }.validate().unwrap(),
        );
        assert!(!none.stream.is_empty());
        assert!(none.stream.last_timestamp().unwrap() <= step_settled + 1e-12);
        // all polarities positive on an upward step
        assert!(none.stream.events().iter().all(|e| e.polarity == Polarity::Pos));
    }

    #[test]
    fn floor_ratio_one_collapses_adv2e_to_fixed() {
        let clip: Vec<(f64, Vec<f64>)> = (0..6)
            .map(|n| {
                let t = n as f64 / 30.0;
                (t, vec![20.0 + 30.0 * n as f64, 200.0 - 25.0 * n as f64])
            })
            .collect();
        let src = source(&clip, 2, 1);
        let base = SimConfig {
            cutoff_floor_ratio: 1.0,
            leak_rate: 0.0,
            shot_noise_rate: 0.0,
            ..SimConfig::default()
        };
        let adv = simulate(&src, &SimConfig { filter_mode: FilterMode::Adv2e, ..base.clone() }.validate().unwrap());
        let fixed = simulate(&src, &SimConfig { filter_mode: FilterMode::Fixed, ..base }.validate().unwrap());
        assert_eq!(adv.stream, fixed.stream);
        assert!(!adv.stream.is_empty());
    }

    #[test]
    fn band_split_matches_full_run() {
        let clip: Vec<(f64, Vec<f64>)> = (0..5)
            .map(|n| {
                let t = n as f64 / 24.0;
                let data: Vec<f64> =
                    (0..12).map(|i| ((i + n * 3) % 13) as f64 * 19.0).collect();
                (t, data)
            })
            .collect();
        let src = source(&clip, 4, 3);
        let cfg = SimConfig {
            leak_rate: 0.05,
            shot_noise_rate: 2.0,
            rng_seed: 99,
            ..SimConfig::default()
        }
        .validate()
        .unwrap();

        let whole = simulate(&src, &cfg);
        let bands = vec![
            simulate_rows(&src, &cfg, 0..1),
            simulate_rows(&src, &cfg, 1..3),
        ];
        let split = combine_bands(&src, bands);
        assert_eq!(whole.stream, split.stream);
        assert_eq!(whole.final_states, split.final_states);
        assert_eq!(whole.max_alpha, split.max_alpha);
        assert_eq!(whole.alpha_warnings, split.alpha_warnings);
        assert!(!whole.stream.is_empty());
    }

    #[test]
    fn same_seed_reproduces_noisy_stream() {
        let src = source(&[(0.0, vec![100.0; 4]), (1.0, vec![100.0; 4])], 2, 2);
        let make = |seed| {
            SimConfig { rng_seed: seed, shot_noise_rate: 40.0, ..SimConfig::default() }
                .validate()
                .unwrap()
        };
        let a = simulate(&src, &make(5));
        let b = simulate(&src, &make(5));
        let c = simulate(&src, &make(6));
        assert_eq!(a.stream, b.stream);
        assert!(!a.stream.is_empty());
        assert_ne!(a.stream, c.stream);
    }

    #[test]
    fn streamed_samples_match_materialized_pipeline() {
        // the engine must agree with the composable operations it shortcuts
        let clip: Vec<(f64, Vec<f64>)> = vec![
            (0.0, vec![10.0, 200.0]),
            (0.05, vec![130.0, 40.0]),
            (0.10, vec![255.0, 90.0]),
        ];
        let src = source(&clip, 2, 1);
        let cfg = quiet(FilterMode::Adv2e);

        let streamed = simulate(&src, &cfg);

        // materialized route: interpolate, log, continuity-sample, filter
        let interp = src.interpolate_linear(cfg.interp_factor).unwrap();
        let lin_frames = interp.frames();
        let log_frames: Vec<Frame> =
            lin_frames.iter().map(|f| super::super::log_transform(f, cfg.log_eps)).collect();

        let cutoff = CutoffModel::from_config(&cfg);
        let mut states: Vec<PixelState> =
            log_frames[0].data().iter().map(|&v| PixelState::new(v)).collect();
        let mut events = Vec::new();
        let mut t_prev = log_frames[0].timestamp;
        for n in 0..log_frames.len() - 1 {
            let logs =
                continuity_sample(&log_frames[n], &log_frames[n + 1], cfg.oversample_factor)
                    .unwrap();
            let lins =
                continuity_sample(&lin_frames[n], &lin_frames[n + 1], cfg.oversample_factor)
                    .unwrap();
            for (log_s, lin_s) in logs.iter().zip(&lins) {
                if n == 0 && log_s.timestamp == t_prev {
                    continue; // initialization sample
                }
                let dt = log_s.timestamp - t_prev;
                for (i, state) in states.iter_mut().enumerate() {
                    let alpha = cutoff.omega0(lin_s.data()[i]) * dt;
                    state.y = filter_step(state.y, log_s.data()[i], alpha);
                    let filtered = state.y;
                    generate_pixel_events(
                        state,
                        filtered,
                        (i % 2) as u16,
                        0,
                        t_prev,
                        log_s.timestamp,
                        cfg.pos_threshold,
                        cfg.neg_threshold,
                        &mut events,
                    );
                }
                t_prev = log_s.timestamp;
            }
        }
        // terminal sample
        let last_log = &log_frames[log_frames.len() - 1];
        let last_lin = &lin_frames[lin_frames.len() - 1];
        let dt = last_log.timestamp - t_prev;
        for (i, state) in states.iter_mut().enumerate() {
            let alpha = cutoff.omega0(last_lin.data()[i]) * dt;
            state.y = filter_step(state.y, last_log.data()[i], alpha);
            let filtered = state.y;
            generate_pixel_events(
                state,
                filtered,
                (i % 2) as u16,
                0,
                t_prev,
                last_log.timestamp,
                cfg.pos_threshold,
                cfg.neg_threshold,
                &mut events,
            );
        }

        let reference = EventStream::from_events(2, 1, events).unwrap();
        assert_eq!(streamed.stream, reference);
        assert!(!reference.is_empty());
        for (state, expected) in streamed.final_states.iter().zip(&states) {
            assert_eq!(state, expected);
        }
    }

    #[test]
    fn alpha_warning_triggers_in_undersampled_regime() {
        // K = L = 1 at 10 fps with a 250 Hz cutoff: alpha = 2*pi*25 >> 1
        let src = source(&[(0.0, vec![0.0]), (0.1, vec![255.0]), (0.2, vec![255.0])], 1, 1);
        let cfg = SimConfig {
            interp_factor: 1,
            oversample_factor: 1,
            leak_rate: 0.0,
            ..SimConfig::default()
        }
        .validate()
        .unwrap();
        let result = simulate(&src, &cfg);
        assert!(result.max_alpha > 1.0);
        assert!(result.alpha_warnings > 0);

        // well-sampled defaults stay under the bound
        let src2 = source(&[(0.0, vec![0.0]), (1.0 / 24.0, vec![255.0]), (2.0 / 24.0, vec![255.0])], 1, 1);
        let cfg2 = SimConfig { leak_rate: 0.0, ..SimConfig::default() }.validate().unwrap();
        let result2 = simulate(&src2, &cfg2);
        assert!(result2.alpha_warnings == 0);
        assert!(result2.max_alpha <= cfg2.alpha_bound(1.0 / 24.0) * (1.0 + 1e-12));
    }
}
