//! Shared domain vocabulary: frames, events, event streams.

use alloc::vec::Vec;
use core::cmp::Ordering;

/// Full-scale linear intensity of 8-bit sources.
pub const I_MAX: f64 = 255.0;

/// Sign of a brightness change.
///
/// `Neg` sorts before `Pos`, which fixes the tie-break order for events
/// that share a timestamp and pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Polarity {
    Neg,
    Pos,
}

impl Polarity {
    /// −1 for `Neg`, +1 for `Pos`.
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Neg => -1,
            Polarity::Pos => 1,
        }
    }

    /// 0/1 encoding used by the on-disk formats.
    pub fn bit(self) -> u8 {
        match self {
            Polarity::Neg => 0,
            Polarity::Pos => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Polarity::Neg),
            1 => Some(Polarity::Pos),
            _ => None,
        }
    }
}

/// Single DVS event: pixel location, timestamp in seconds, polarity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub x: u16,
    pub y: u16,
    pub t: f64,
    pub polarity: Polarity,
}

impl Event {
    /// Total order used everywhere events are serialized or compared:
    /// time first, ties broken by (y, x, polarity).
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then(self.y.cmp(&other.y))
            .then(self.x.cmp(&other.x))
            .then(self.polarity.cmp(&other.polarity))
    }
}

/// Errors from building an [`EventStream`] out of raw events.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StreamError {
    #[error("event ({x},{y}) outside sensor {width}x{height}")]
    OutOfBounds { x: u16, y: u16, width: u32, height: u32 },
    #[error("event timestamp {t} is not a finite non-negative number")]
    InvalidTimestamp { t: f64 },
    #[error("sensor dimensions {width}x{height} are invalid")]
    InvalidGeometry { width: u32, height: u32 },
}

/// Ordered sequence of events with the sensor geometry they belong to.
///
/// Construction always sorts into the canonical order, so two streams with
/// the same events compare equal regardless of how they were produced.
#[derive(Clone, Debug, PartialEq)]
pub struct EventStream {
    width: u32,
    height: u32,
    events: Vec<Event>,
}

impl EventStream {
    /// Empty stream for a sensor of the given size.
    pub fn empty(width: u32, height: u32) -> Self {
        EventStream { width, height, events: Vec::new() }
    }

    /// Validates every event against the sensor bounds and sorts canonically.
    pub fn from_events(width: u32, height: u32, events: Vec<Event>) -> Result<Self, StreamError> {
        if width == 0 || height == 0 || width > u16::MAX as u32 + 1 || height > u16::MAX as u32 + 1
        {
            return Err(StreamError::InvalidGeometry { width, height });
        }
        for ev in &events {
            if (ev.x as u32) >= width || (ev.y as u32) >= height {
                return Err(StreamError::OutOfBounds { x: ev.x, y: ev.y, width, height });
            }
            if !ev.t.is_finite() || ev.t < 0.0 {
                return Err(StreamError::InvalidTimestamp { t: ev.t });
            }
        }
        let mut stream = EventStream { width, height, events };
        stream.sort_canonical();
        Ok(stream)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Re-establishes the canonical (t, y, x, polarity) order. Idempotent.
    pub fn sort_canonical(&mut self) {
        self.events.sort_unstable_by(Event::canonical_cmp);
    }

    pub fn first_timestamp(&self) -> Option<f64> {
        self.events.first().map(|e| e.t)
    }

    pub fn last_timestamp(&self) -> Option<f64> {
        self.events.last().map(|e| e.t)
    }
}

/// Errors from constructing a single [`Frame`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("data length {got} does not match {width}x{height}")]
    LengthMismatch { width: u32, height: u32, got: usize },
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
    #[error("timestamp {t} is not a finite non-negative number")]
    InvalidTimestamp { t: f64 },
    #[error("frame dimensions {width}x{height} are invalid")]
    InvalidGeometry { width: u32, height: u32 },
}

/// Single-channel intensity image with a timestamp.
///
/// Linear frames hold values in `[0, I_MAX]`; the same type carries
/// log-domain values after [`crate::pixel::log_transform`].
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    width: u32,
    height: u32,
    pub timestamp: f64,
    data: Vec<f64>,
}

impl Frame {
    pub fn new(width: u32, height: u32, timestamp: f64, data: Vec<f64>) -> Result<Self, FrameError> {
        if width == 0 || height == 0 || width > u16::MAX as u32 + 1 || height > u16::MAX as u32 + 1
        {
            return Err(FrameError::InvalidGeometry { width, height });
        }
        if data.len() != (width as usize) * (height as usize) {
            return Err(FrameError::LengthMismatch { width, height, got: data.len() });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(FrameError::NonFinite { index });
        }
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(FrameError::InvalidTimestamp { t: timestamp });
        }
        Ok(Frame { width, height, timestamp, data })
    }

    /// Frame with every pixel set to `value`.
    pub fn filled(width: u32, height: u32, timestamp: f64, value: f64) -> Result<Self, FrameError> {
        let len = (width as usize) * (height as usize);
        Frame::new(width, height, timestamp, alloc::vec![value; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[(y * self.width + x) as usize]
    }

    /// Applies `f` to every sample, keeping geometry and timestamp.
    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> Frame {
        Frame {
            width: self.width,
            height: self.height,
            timestamp: self.timestamp,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}
