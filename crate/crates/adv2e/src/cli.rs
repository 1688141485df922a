//! Command-line interface: `simulate`, `compare`, and `render`.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 I/O error,
//! 3 internal invariant violation. Output files are written under a
//! `.partial` suffix and renamed into place only when complete.

use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use adv2e_core::metrics::{build_voxel_grid, stream_stats, voxel_distance, StatsReport};
use adv2e_core::{EventStream, FilterMode, SimConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::driver::simulate_threaded;
use crate::event_io;
use crate::ingest;
use crate::render;
use crate::run_manifest::{sha256_hex, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "adv2e", version, about = "DVS event-stream simulator for video frame sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert a frame sequence into a DVS event stream.
    Simulate(SimulateArgs),
    /// Compare two event streams with the temporal-bin Euclidean distance.
    Compare(CompareArgs),
    /// Render a signed accumulation image of an event stream window.
    Render(RenderArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Binary,
}

impl OutputFormat {
    fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Text => "text",
            OutputFormat::Binary => "binary",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    None,
    Fixed,
    Adv2e,
}

impl From<ModeArg> for FilterMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::None => FilterMode::None,
            ModeArg::Fixed => FilterMode::Fixed,
            ModeArg::Adv2e => FilterMode::Adv2e,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Frame manifest: one `<relative-path> <timestamp-seconds>` per line.
    #[arg(long)]
    pub input: PathBuf,
    /// JSON configuration file; keys mirror the simulator config fields.
    #[arg(long)]
    pub config: PathBuf,
    /// Output event file.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Override the configured filter mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Override the configured RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<NonZeroUsize>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// First event file (text or binary).
    #[arg(long)]
    pub a: PathBuf,
    /// Second event file (text or binary).
    #[arg(long)]
    pub b: PathBuf,
    /// Temporal bins per grid.
    #[arg(long, default_value_t = 5)]
    pub bins: u32,
    /// Comparison window `t0,t1` in seconds; defaults to the union of both
    /// streams' spans.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Event file (text or binary).
    #[arg(long)]
    pub input: PathBuf,
    /// Accumulation window `t0,t1` in seconds.
    #[arg(long)]
    pub window: String,
    /// Output PNG.
    #[arg(long)]
    pub output: PathBuf,
}

/// CLI failure with its exit-code class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => run_simulate(&args),
        Command::Compare(args) => run_compare(&args),
        Command::Render(args) => run_render(&args),
    }
}

/// Prints to stdout, treating a closed pipe (e.g. `| head`) as success.
fn print_stdout(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    match writeln!(std::io::stdout(), "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::Io(format!("stdout: {e}"))),
    }
}

/// Parses a `t0,t1` window argument.
pub fn parse_window(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    let [t0, t1] = parts.as_slice() else {
        return Err(CliError::Config(format!("window must be 't0,t1', got '{text}'")));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("bad window bound '{s}'")))
    };
    let (t0, t1) = (parse(t0)?, parse(t1)?);
    if t1 <= t0 || !t0.is_finite() || !t1.is_finite() {
        return Err(CliError::Config(format!("window end {t1} must be later than start {t0}")));
    }
    Ok((t0, t1))
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes through a `.partial` file renamed into place on success, so an
/// interrupted run never leaves a final-looking but incomplete output.
fn write_atomic<E: std::fmt::Display>(
    path: &Path,
    write: impl FnOnce(&Path) -> Result<(), E>,
) -> Result<(), CliError> {
    let partial = partial_path(path);
    write(&partial).map_err(|e| CliError::Io(format!("writing {}: {e}", partial.display())))?;
    fs::rename(&partial, path)
        .map_err(|e| CliError::Io(format!("finalizing {}: {e}", path.display())))?;
    Ok(())
}

fn load_config(args: &SimulateArgs) -> Result<SimConfig, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", args.config.display())))?;
    let mut cfg: SimConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("bad config {}: {e}", args.config.display())))?;
    if let Some(mode) = args.mode {
        cfg.filter_mode = mode.into();
    }
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    Ok(cfg)
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let started = Instant::now();

    let cfg = load_config(args)?;
    let validated = cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let manifest_bytes = fs::read(&args.input)
        .map_err(|e| CliError::Io(format!("cannot read manifest {}: {e}", args.input.display())))?;
    let src = ingest::load_sequence(&args.input).map_err(|e| CliError::Io(e.to_string()))?;

    let threads = args
        .threads
        .or_else(|| std::thread::available_parallelism().ok())
        .unwrap_or(NonZeroUsize::MIN);
    let result = simulate_threaded(&src, &validated, threads);

    if result.alpha_warnings > 0 {
        eprintln!(
            "adv2e: warning: filter coefficient exceeded 1 in {} updates (max {:.3}); \
             increase oversample_factor or interp_factor",
            result.alpha_warnings, result.max_alpha
        );
    }

    write_atomic(&args.output, |path| match args.format {
        OutputFormat::Text => event_io::write_events_text_path(&result.stream, path),
        OutputFormat::Binary => event_io::write_events_binary_path(&result.stream, path),
    })?;

    let manifest = RunManifest {
        tool: "adv2e".into(),
        version: RunManifest::tool_version(),
        input_manifest: args.input.display().to_string(),
        input_sha256: sha256_hex(&manifest_bytes),
        seed: validated.rng_seed,
        threads: threads.get(),
        format: args.format.as_str().into(),
        output_events: args.output.display().to_string(),
        event_count: result.stream.len() as u64,
        max_alpha: result.max_alpha,
        alpha_warnings: result.alpha_warnings,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        config: validated.into_inner(),
    };
    let manifest_path = RunManifest::path_for(&args.output);
    let json = manifest.to_json().map_err(|e| CliError::Internal(e.to_string()))?;
    write_atomic(&manifest_path, |path| fs::write(path, &json))?;

    print_stdout(&format!(
        "wrote {} events to {} (run manifest: {})",
        manifest.event_count,
        args.output.display(),
        manifest_path.display()
    ))
}

#[derive(Serialize, Deserialize, Debug)]
pub struct StreamReport {
    pub path: String,
    pub width: u32,
    pub height: u32,
    pub stats: StatsReport,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct CompareReport {
    pub voxel_distance: f64,
    pub bins: u32,
    pub window: (f64, f64),
    pub a: StreamReport,
    pub b: StreamReport,
}

fn read_stream(path: &Path) -> Result<EventStream, CliError> {
    event_io::read_events_auto(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn union_window(a: &EventStream, b: &EventStream) -> Option<(f64, f64)> {
    let firsts = [a.first_timestamp(), b.first_timestamp()];
    let lasts = [a.last_timestamp(), b.last_timestamp()];
    let t0 = firsts.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let t1 = lasts.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    (t1 > t0).then_some((t0, t1))
}

fn run_compare(args: &CompareArgs) -> Result<(), CliError> {
    let stream_a = read_stream(&args.a)?;
    let stream_b = read_stream(&args.b)?;

    let window = match &args.window {
        Some(text) => parse_window(text)?,
        None => union_window(&stream_a, &stream_b).ok_or_else(|| {
            CliError::Config("cannot infer a window from the streams; pass --window t0,t1".into())
        })?,
    };

    let grid_a = build_voxel_grid(&stream_a, args.bins, window.0, window.1)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let grid_b = build_voxel_grid(&stream_b, args.bins, window.0, window.1)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let distance = voxel_distance(&grid_a, &grid_b).map_err(|e| CliError::Config(e.to_string()))?;

    let report_for = |path: &Path, stream: &EventStream, dropped: u64| StreamReport {
        path: path.display().to_string(),
        width: stream.width(),
        height: stream.height(),
        stats: StatsReport { window_dropped: Some(dropped), ..stream_stats(stream) },
    };
    let report = CompareReport {
        voxel_distance: distance,
        bins: args.bins,
        window,
        a: report_for(&args.a, &stream_a, grid_a.dropped_events()),
        b: report_for(&args.b, &stream_b, grid_b.dropped_events()),
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    print_stdout(&json)
}

fn run_render(args: &RenderArgs) -> Result<(), CliError> {
    let stream = read_stream(&args.input)?;
    let (t0, t1) = parse_window(&args.window)?;
    let img = render::render_accumulation(&stream, t0, t1)
        .map_err(|e| CliError::Config(e.to_string()))?;
    write_atomic(&args.output, |path| img.save_with_format(path, image::ImageFormat::Png))?;
    print_stdout(&format!("wrote accumulation image to {}", args.output.display()))
}
