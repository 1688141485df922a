//! Shared helpers for integration tests.
#![allow(dead_code)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adv2e_core::{Frame, FrameSource};

pub fn bin_path() -> &'static str {
    env!("CARGO_BIN_EXE_adv2e")
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(bin_path()).args(args).output().expect("failed to launch adv2e binary")
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process terminated by signal")
}

pub fn stderr_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

pub fn stdout_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Builds an in-memory frame source from per-frame closures.
pub fn synth_source(
    width: u32,
    height: u32,
    timestamps: &[f64],
    value: impl Fn(u32, u32, usize) -> f64,
) -> FrameSource {
    let frames = timestamps
        .iter()
        .enumerate()
        .map(|(n, &t)| {
            let data: Vec<f64> =
                (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| value(x, y, n)).collect();
            Frame::new(width, height, t, data).unwrap()
        })
        .collect();
    FrameSource::new(frames).unwrap()
}

pub fn write_pgm(path: &Path, width: u32, height: u32, pixels: &[u8]) {
    assert_eq!(pixels.len(), (width * height) as usize);
    let mut f = fs::File::create(path).unwrap();
    write!(f, "P5\n{width} {height}\n255\n").unwrap();
    f.write_all(pixels).unwrap();
}

/// Writes a PGM clip plus manifest into `dir`; returns the manifest path.
pub fn write_clip(
    dir: &Path,
    width: u32,
    height: u32,
    timestamps: &[f64],
    value: impl Fn(u32, u32, usize) -> u8,
) -> PathBuf {
    let mut manifest = String::new();
    for (n, &t) in timestamps.iter().enumerate() {
        let name = format!("frame{n:04}.pgm");
        let pixels: Vec<u8> = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| value(x, y, n))
            .collect();
        write_pgm(&dir.join(&name), width, height, &pixels);
        manifest.push_str(&format!("{name} {t}\n"));
    }
    let path = dir.join("frames.txt");
    fs::write(&path, manifest).unwrap();
    path
}

/// Writes a config JSON file; `body` is the raw JSON object text.
pub fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

/// Timestamps `0, 1/rate, 2/rate, ...` for `n` frames.
pub fn uniform_timestamps(n: usize, rate: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 / rate).collect()
}
