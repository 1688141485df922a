//! Event stream file formats.
//!
//! Two formats carry the same information at microsecond resolution:
//!
//! * text: header `# adv2e-events v1 <width> <height>`, then one
//!   `t_us,x,y,p` record per line with `p` in `{0, 1}` for off/on;
//! * binary: 16-byte header (magic `ADV2E\0`, u16 version = 1, u16 width,
//!   u16 height, u16 reserved, 2 zero pad bytes), then little-endian
//!   13-byte records `u64 t_us, u16 x, u16 y, u8 p`.
//!
//! Timestamps are stored as `round(t * 1e6)` integer microseconds, so a
//! write/read round trip is exact at that resolution. Writers emit events
//! in canonical stream order, which makes serialization deterministic.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use adv2e_core::{Event, EventStream, Polarity};

pub const BINARY_MAGIC: &[u8; 6] = b"ADV2E\0";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 16;
const RECORD_LEN: usize = 13;

#[derive(Debug, thiserror::Error)]
pub enum EventIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("line {line}: event ({x},{y}) outside sensor {width}x{height}")]
    OutOfBounds { line: u64, x: u16, y: u16, width: u32, height: u32 },
    #[error("bad magic: not an adv2e event file")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated file: {0}")]
    Truncated(String),
    #[error("record {index}: {msg}")]
    BadRecord { index: u64, msg: String },
    #[error("sensor {width}x{height} does not fit the 16-bit header fields")]
    GeometryTooLarge { width: u32, height: u32 },
}

fn timestamp_us(t: f64) -> u64 {
    (t * 1e6).round() as u64
}

fn check_geometry(stream: &EventStream) -> Result<(u16, u16), EventIoError> {
    let (w, h) = (stream.width(), stream.height());
    if w > u16::MAX as u32 || h > u16::MAX as u32 {
        return Err(EventIoError::GeometryTooLarge { width: w, height: h });
    }
    Ok((w as u16, h as u16))
}

/// Writes the text format to any sink.
pub fn write_events_text<W: Write>(stream: &EventStream, mut out: W) -> Result<(), EventIoError> {
    writeln!(out, "# adv2e-events v1 {} {}", stream.width(), stream.height())?;
    for ev in stream.events() {
        writeln!(out, "{},{},{},{}", timestamp_us(ev.t), ev.x, ev.y, ev.polarity.bit())?;
    }
    Ok(())
}

/// Reads the text format from any source.
pub fn read_events_text<R: BufRead>(input: R) -> Result<EventStream, EventIoError> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(EventIoError::Parse { line: 1, msg: "empty file".into() }),
    };
    let mut parts = header.split_whitespace();
    if parts.next() != Some("#") || parts.next() != Some("adv2e-events") {
        return Err(EventIoError::Parse { line: 1, msg: "missing adv2e-events header".into() });
    }
    if parts.next() != Some("v1") {
        return Err(EventIoError::Parse { line: 1, msg: "unsupported text format version".into() });
    }
    let dims: Vec<u32> = parts
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| EventIoError::Parse { line: 1, msg: "bad sensor dimensions".into() })?;
    let &[width, height] = dims.as_slice() else {
        return Err(EventIoError::Parse { line: 1, msg: "bad sensor dimensions".into() });
    };

    let mut events = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx as u64 + 2;
        let raw = line?;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 4 {
            return Err(EventIoError::Parse {
                line: line_no,
                msg: format!("expected 4 comma-separated fields, got {}", fields.len()),
            });
        }
        let t_us: u64 = fields[0].parse().map_err(|_| EventIoError::Parse {
            line: line_no,
            msg: format!("bad timestamp '{}'", fields[0]),
        })?;
        let x: u16 = fields[1].parse().map_err(|_| EventIoError::Parse {
            line: line_no,
            msg: format!("bad x '{}'", fields[1]),
        })?;
        let y: u16 = fields[2].parse().map_err(|_| EventIoError::Parse {
            line: line_no,
            msg: format!("bad y '{}'", fields[2]),
        })?;
        let p: u8 = fields[3].parse().map_err(|_| EventIoError::Parse {
            line: line_no,
            msg: format!("bad polarity '{}'", fields[3]),
        })?;
        let polarity = Polarity::from_bit(p).ok_or_else(|| EventIoError::Parse {
            line: line_no,
            msg: format!("polarity must be 0 or 1, got {p}"),
        })?;
        if (x as u32) >= width || (y as u32) >= height {
            return Err(EventIoError::OutOfBounds { line: line_no, x, y, width, height });
        }
        events.push(Event { x, y, t: t_us as f64 * 1e-6, polarity });
    }

    EventStream::from_events(width, height, events)
        .map_err(|e| EventIoError::Parse { line: 1, msg: e.to_string() })
}

/// Writes the binary format to any sink.
pub fn write_events_binary<W: Write>(stream: &EventStream, mut out: W) -> Result<(), EventIoError> {
    let (w, h) = check_geometry(stream)?;
    let mut header = [0u8; HEADER_LEN];
    header[0..6].copy_from_slice(BINARY_MAGIC);
    header[6..8].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
    header[8..10].copy_from_slice(&w.to_le_bytes());
    header[10..12].copy_from_slice(&h.to_le_bytes());
    // bytes 12..16 reserved, zero
    out.write_all(&header)?;

    let mut record = [0u8; RECORD_LEN];
    for ev in stream.events() {
        record[0..8].copy_from_slice(&timestamp_us(ev.t).to_le_bytes());
        record[8..10].copy_from_slice(&ev.x.to_le_bytes());
        record[10..12].copy_from_slice(&ev.y.to_le_bytes());
        record[12] = ev.polarity.bit();
        out.write_all(&record)?;
    }
    Ok(())
}

/// Reads the binary format from any source.
pub fn read_events_binary<R: Read>(mut input: R) -> Result<EventStream, EventIoError> {
    let mut header = [0u8; HEADER_LEN];
    read_exact_or(&mut input, &mut header, || {
        EventIoError::Truncated("file shorter than the 16-byte header".into())
    })?;
    if &header[0..6] != BINARY_MAGIC {
        return Err(EventIoError::BadMagic);
    }
    let version = u16::from_le_bytes([header[6], header[7]]);
    if version != FORMAT_VERSION {
        return Err(EventIoError::UnsupportedVersion(version));
    }
    let width = u16::from_le_bytes([header[8], header[9]]) as u32;
    let height = u16::from_le_bytes([header[10], header[11]]) as u32;

    let mut events = Vec::new();
    let mut record = [0u8; RECORD_LEN];
    let mut index = 0u64;
    loop {
        // distinguish clean EOF from a record cut short
        let first = input.read(&mut record[0..1])?;
        if first == 0 {
            break;
        }
        read_exact_or(&mut input, &mut record[1..], || {
            EventIoError::Truncated(format!("record {index} cut short"))
        })?;

        let t_us = u64::from_le_bytes(record[0..8].try_into().expect("8-byte slice"));
        let x = u16::from_le_bytes([record[8], record[9]]);
        let y = u16::from_le_bytes([record[10], record[11]]);
        let polarity = Polarity::from_bit(record[12]).ok_or_else(|| EventIoError::BadRecord {
            index,
            msg: format!("polarity byte must be 0 or 1, got {}", record[12]),
        })?;
        if (x as u32) >= width || (y as u32) >= height {
            return Err(EventIoError::BadRecord {
                index,
                msg: format!("event ({x},{y}) outside sensor {width}x{height}"),
            });
        }
        events.push(Event { x, y, t: t_us as f64 * 1e-6, polarity });
        index += 1;
    }

    EventStream::from_events(width, height, events)
        .map_err(|e| EventIoError::BadRecord { index, msg: e.to_string() })
}

fn read_exact_or<R: Read>(
    input: &mut R,
    buf: &mut [u8],
    on_eof: impl Fn() -> EventIoError,
) -> Result<(), EventIoError> {
    match input.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Err(on_eof()),
        Err(e) => Err(e.into()),
    }
}

pub fn write_events_text_path(stream: &EventStream, path: &Path) -> Result<(), EventIoError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_events_text(stream, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_events_text_path(path: &Path) -> Result<EventStream, EventIoError> {
    read_events_text(BufReader::new(File::open(path)?))
}

pub fn write_events_binary_path(stream: &EventStream, path: &Path) -> Result<(), EventIoError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_events_binary(stream, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_events_binary_path(path: &Path) -> Result<EventStream, EventIoError> {
    read_events_binary(BufReader::new(File::open(path)?))
}

/// Reads either format, sniffing the first byte (`A` for binary magic,
/// `#` for the text header).
pub fn read_events_auto(path: &Path) -> Result<EventStream, EventIoError> {
    let mut reader = BufReader::new(File::open(path)?);
    let head = reader.fill_buf()?;
    if head.starts_with(b"ADV2E") {
        read_events_binary(reader)
    } else {
        read_events_text(reader)
    }
}
