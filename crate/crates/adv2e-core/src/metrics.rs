//! Temporal-bin (voxel grid) stream representations and comparison metrics.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::types::{EventStream, Polarity};

/// Errors from grid construction or comparison.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("window end {t_end} must be later than start {t_start}")]
    InvalidWindow { t_start: f64, t_end: f64 },
    #[error("bin count must be >= 1")]
    InvalidBins,
    #[error("grids differ in shape: {0}x{1}x{2} vs {3}x{4}x{5}")]
    DimensionMismatch(u32, u32, u32, u32, u32, u32),
    #[error("grids cover different windows")]
    WindowMismatch,
    #[error("expected {expected} cell values, got {got}")]
    WrongCellCount { expected: usize, got: usize },
    #[error("non-finite cell value at index {index}")]
    NonFiniteCell { index: usize },
}

/// Polarity-signed temporal-bin accumulator over a time window.
///
/// Each event spreads its polarity bilinearly over the two nearest bins;
/// bin centers sit at normalized positions `0..bins-1` across the window.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelGrid {
    bins: u32,
    width: u32,
    height: u32,
    t_start: f64,
    t_end: f64,
    values: Vec<f64>,
    dropped_events: u64,
}

impl VoxelGrid {
    pub fn bins(&self) -> u32 {
        self.bins
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    /// Bin-major, then row-major cell values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, bin: u32, x: u32, y: u32) -> f64 {
        self.values[(bin * self.height + y) as usize * self.width as usize + x as usize]
    }

    /// Events that fell outside the window and were ignored.
    pub fn dropped_events(&self) -> u64 {
        self.dropped_events
    }

    pub fn signed_sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// Builds a grid directly from cell values (bin-major, then row-major),
    /// e.g. for representations computed elsewhere.
    pub fn from_values(
        bins: u32,
        width: u32,
        height: u32,
        t_start: f64,
        t_end: f64,
        values: Vec<f64>,
    ) -> Result<Self, MetricsError> {
        if bins < 1 {
            return Err(MetricsError::InvalidBins);
        }
        if t_end <= t_start || !t_start.is_finite() || !t_end.is_finite() {
            return Err(MetricsError::InvalidWindow { t_start, t_end });
        }
        let expected = bins as usize * width as usize * height as usize;
        if values.len() != expected {
            return Err(MetricsError::WrongCellCount { expected, got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(MetricsError::NonFiniteCell { index });
        }
        Ok(VoxelGrid { bins, width, height, t_start, t_end, values, dropped_events: 0 })
    }
}

/// Accumulates a stream into a voxel grid over `[t_start, t_end]`.
///
/// An event at normalized position `tau = (t - t_start) / (t_end - t_start)
/// * (bins - 1)` adds `p * (1 - frac(tau))` to bin `floor(tau)` and
/// `p * frac(tau)` to the next bin. Events outside the window are counted
/// in [`VoxelGrid::dropped_events`] and otherwise ignored.
pub fn build_voxel_grid(
    stream: &EventStream,
    bins: u32,
    t_start: f64,
    t_end: f64,
) -> Result<VoxelGrid, MetricsError> {
    if bins < 1 {
        return Err(MetricsError::InvalidBins);
    }
    if t_end <= t_start || !t_start.is_finite() || !t_end.is_finite() {
        return Err(MetricsError::InvalidWindow { t_start, t_end });
    }

    let cells = bins as usize * stream.width() as usize * stream.height() as usize;
    let mut values = vec![0.0f64; cells];
    let plane = stream.width() as usize * stream.height() as usize;
    let scale = (bins - 1) as f64 / (t_end - t_start);
    let mut dropped = 0u64;

    for ev in stream.events() {
        if ev.t < t_start || ev.t > t_end {
            dropped += 1;
            continue;
        }
        let tau = ((ev.t - t_start) * scale).clamp(0.0, (bins - 1) as f64);
        let lower = math::floor(tau);
        let frac = tau - lower;
        let bin = lower as usize;
        let p = ev.polarity.sign() as f64;
        let cell = bin * plane + ev.y as usize * stream.width() as usize + ev.x as usize;
        values[cell] += p * (1.0 - frac);
        if frac > 0.0 && bin + 1 < bins as usize {
            values[cell + plane] += p * frac;
        }
    }

    Ok(VoxelGrid {
        bins,
        width: stream.width(),
        height: stream.height(),
        t_start,
        t_end,
        values,
        dropped_events: dropped,
    })
}

/// Euclidean distance between two same-shaped grids over all cells.
pub fn voxel_distance(a: &VoxelGrid, b: &VoxelGrid) -> Result<f64, MetricsError> {
    if (a.bins, a.width, a.height) != (b.bins, b.width, b.height) {
        return Err(MetricsError::DimensionMismatch(
            a.bins, a.width, a.height, b.bins, b.width, b.height,
        ));
    }
    if a.t_start != b.t_start || a.t_end != b.t_end {
        return Err(MetricsError::WindowMismatch);
    }
    let sum_sq: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&va, &vb)| {
            let d = va - vb;
            d * d
        })
        .sum();
    Ok(math::sqrt(sum_sq))
}

/// One bucket of the inter-event-interval histogram.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IeiBucket {
    pub lo_us: u64,
    /// Exclusive upper bound; open-ended for the last bucket.
    pub hi_us: Option<u64>,
    pub count: u64,
}

/// Summary statistics of an event stream.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StatsReport {
    pub count: u64,
    pub pos_count: u64,
    pub neg_count: u64,
    /// Span between first and last event, seconds.
    pub duration: f64,
    /// Events per second over the span; 0 for degenerate spans.
    pub mean_rate: f64,
    /// Highest single-pixel event rate, events per second.
    pub max_pixel_rate: f64,
    /// Histogram of intervals between consecutive events, decade buckets
    /// in microseconds.
    pub iei_histogram: Vec<IeiBucket>,
    /// Events dropped by a window (populated by windowed operations).
    pub window_dropped: Option<u64>,
}

const IEI_EDGES_US: [u64; 7] = [1, 10, 100, 1_000, 10_000, 100_000, 1_000_000];

/// Computes summary statistics for a stream.
pub fn stream_stats(stream: &EventStream) -> StatsReport {
    let count = stream.len() as u64;
    let pos_count = stream
        .events()
        .iter()
        .filter(|e| e.polarity == Polarity::Pos)
        .count() as u64;
    let neg_count = count - pos_count;

    let duration = match (stream.first_timestamp(), stream.last_timestamp()) {
        (Some(first), Some(last)) => last - first,
        _ => 0.0,
    };
    let mean_rate = if duration > 0.0 { count as f64 / duration } else { 0.0 };

    let mut per_pixel = vec![0u64; stream.width() as usize * stream.height() as usize];
    for ev in stream.events() {
        per_pixel[ev.y as usize * stream.width() as usize + ev.x as usize] += 1;
    }
    let max_pixel_count = per_pixel.iter().copied().max().unwrap_or(0);
    let max_pixel_rate =
        if duration > 0.0 { max_pixel_count as f64 / duration } else { 0.0 };

    let mut buckets: Vec<IeiBucket> = {
        let mut edges = Vec::with_capacity(IEI_EDGES_US.len() + 1);
        let mut lo = 0u64;
        for &hi in &IEI_EDGES_US {
            edges.push(IeiBucket { lo_us: lo, hi_us: Some(hi), count: 0 });
            lo = hi;
        }
        edges.push(IeiBucket { lo_us: lo, hi_us: None, count: 0 });
        edges
    };
    for pair in stream.events().windows(2) {
        let gap_us = (pair[1].t - pair[0].t) * 1e6;
        let slot = buckets
            .iter_mut()
            .find(|b| match b.hi_us {
                Some(hi) => gap_us < hi as f64,
                None => true,
            })
            .expect("open-ended bucket catches everything");
        slot.count += 1;
    }

    StatsReport {
        count,
        pos_count,
        neg_count,
        duration,
        mean_rate,
        max_pixel_rate,
        iei_histogram: buckets,
        window_dropped: None,
    }
}
