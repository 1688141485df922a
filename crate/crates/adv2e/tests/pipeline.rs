//! Library-level end-to-end behavior of the full pipeline.

mod common;

use adv2e::event_io;
use adv2e::render;
use adv2e_core::metrics::{build_voxel_grid, voxel_distance};
use adv2e_core::{simulate, FilterMode, Polarity, SimConfig};
use common::{synth_source, uniform_timestamps};

fn moving_bar(width: u32, height: u32, n_frames: usize, rate: f64) -> adv2e_core::FrameSource {
    // bright vertical bar sweeping over a dark background: high contrast
    let ts = uniform_timestamps(n_frames, rate);
    synth_source(width, height, &ts, move |x, _y, n| {
        let bar = (n as u32 * 2) % width;
        if x >= bar && x < bar + 3 {
            255.0
        } else {
            10.0
        }
    })
}

fn quiet(mode: FilterMode, k: u32) -> SimConfig {
    SimConfig {
        filter_mode: mode,
        oversample_factor: k,
        interp_factor: 5,
        cutoff_max: 25.0,
        leak_rate: 0.0,
        shot_noise_rate: 0.0,
        ..SimConfig::default()
    }
}

#[test]
fn filtered_stream_is_closer_to_dense_oracle_than_unfiltered() {
    let src = moving_bar(32, 24, 21, 100.0);

    let oracle = simulate(&src, &quiet(FilterMode::Adv2e, 400).validate().unwrap());
    let adv = simulate(&src, &quiet(FilterMode::Adv2e, 10).validate().unwrap());
    let none = simulate(&src, &quiet(FilterMode::None, 10).validate().unwrap());

    let window = (src.first_timestamp(), src.last_timestamp());
    let grid = |stream| build_voxel_grid(stream, 5, window.0, window.1).unwrap();
    let g_oracle = grid(&oracle.stream);
    let d_adv = voxel_distance(&grid(&adv.stream), &g_oracle).unwrap();
    let d_none = voxel_distance(&grid(&none.stream), &g_oracle).unwrap();

    assert!(
        d_adv < d_none,
        "filtered stream should approximate the dense run better: {d_adv} vs {d_none}"
    );
    assert!(d_adv > 0.0);
}

#[test]
fn simulated_stream_roundtrips_both_formats() {
    let src = moving_bar(16, 12, 6, 50.0);
    let result = simulate(&src, &quiet(FilterMode::Adv2e, 10).validate().unwrap());
    assert!(!result.stream.is_empty());

    let mut text = Vec::new();
    event_io::write_events_text(&result.stream, &mut text).unwrap();
    let from_text = event_io::read_events_text(&text[..]).unwrap();

    let mut bin = Vec::new();
    event_io::write_events_binary(&result.stream, &mut bin).unwrap();
    let from_bin = event_io::read_events_binary(&bin[..]).unwrap();

    // both formats agree after microsecond quantization
    assert_eq!(from_text, from_bin);
    assert_eq!(from_text.len(), result.stream.len());
    for (orig, back) in result.stream.events().iter().zip(from_text.events()) {
        assert_eq!((orig.x, orig.y, orig.polarity), (back.x, back.y, back.polarity));
        assert!((orig.t - back.t).abs() <= 5e-7, "quantization within half a microsecond");
    }
}

#[test]
fn render_of_moving_scene_is_not_neutral() {
    let src = moving_bar(16, 12, 6, 50.0);
    let result = simulate(&src, &quiet(FilterMode::Adv2e, 10).validate().unwrap());
    let img = render::render_accumulation(
        &result.stream,
        src.first_timestamp(),
        src.last_timestamp(),
    )
    .unwrap();
    assert!(img.pixels().any(|p| p.0 != [128, 128, 128]));
}

#[test]
fn leak_rate_sets_event_count_exactly_on_static_scene() {
    // 1 pixel, 10 s at 0.5 Hz leak: five +1 events, none without leak
    let ts = uniform_timestamps(101, 10.0);
    let src = synth_source(1, 1, &ts, |_, _, _| 128.0);
    let cfg = SimConfig {
        filter_mode: FilterMode::None,
        interp_factor: 1,
        oversample_factor: 10,
        leak_rate: 0.5,
        shot_noise_rate: 0.0,
        rng_seed: 11,
        ..SimConfig::default()
    };
    let result = simulate(&src, &cfg.clone().validate().unwrap());
    assert_eq!(result.stream.len(), 5);
    assert!(result.stream.events().iter().all(|e| e.polarity == Polarity::Pos));

    let silent = simulate(
        &src,
        &SimConfig { leak_rate: 0.0, ..cfg }.validate().unwrap(),
    );
    assert!(silent.stream.is_empty());
}

#[test]
fn shot_noise_count_is_deterministic_and_plausible() {
    let ts = uniform_timestamps(11, 1.0);
    let src = synth_source(1, 1, &ts, |_, _, _| 0.0);
    let cfg = SimConfig {
        filter_mode: FilterMode::None,
        interp_factor: 10,
        oversample_factor: 10,
        leak_rate: 0.0,
        shot_noise_rate: 50.0,
        rng_seed: 3,
        ..SimConfig::default()
    }
    .validate()
    .unwrap();

    // dt = 0.01 s, scale(0) = 1: expect ~0.5 events/step over 1000 steps
    let a = simulate(&src, &cfg);
    let b = simulate(&src, &cfg);
    assert_eq!(a.stream, b.stream);
    let n = a.stream.len();
    assert!((350..=650).contains(&n), "got {n} events");
}

#[test]
fn printed_oversampling_branch_changes_the_stream() {
    let src = moving_bar(8, 8, 5, 50.0);
    let base = quiet(FilterMode::Adv2e, 10);
    let normal = simulate(&src, &base.clone().validate().unwrap());
    let printed = simulate(
        &src,
        &SimConfig { bridge_extrapolation: true, ..base }.validate().unwrap(),
    );
    assert_ne!(normal.stream, printed.stream);
}
