//! Frame sequence loading from manifest files.
//!
//! A manifest is a plain-text file with one `<relative-frame-path>
//! <timestamp-seconds>` record per line; blank lines and `#` comments are
//! skipped. Paths resolve relative to the manifest's directory. Frames may
//! be 8-bit grayscale or RGB PNG, or binary PGM (P5, maxval 255); RGB is
//! reduced to luma with ITU-R BT.601 weights.

use std::fs;
use std::path::{Path, PathBuf};

use adv2e_core::{Frame, FrameSource, SourceError};
use image::DynamicImage;

/// BT.601 luma weights for RGB inputs.
const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read manifest {path}: {source}")]
    ManifestRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {msg}")]
    ManifestParse { line: usize, msg: String },
    #[error("missing frame file {path}")]
    MissingFile { path: PathBuf },
    #[error("cannot decode frame {path}: {source}")]
    ImageDecode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("frame {path}: unsupported pixel format {format}")]
    UnsupportedFormat { path: PathBuf, format: String },
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Frame(#[from] adv2e_core::types::FrameError),
}

/// Converts a decoded image to linear intensities in `[0, 255]`.
fn image_to_intensities(img: &DynamicImage, path: &Path) -> Result<(u32, u32, Vec<f64>), IngestError> {
    let (w, h) = (img.width(), img.height());
    let data = match img {
        DynamicImage::ImageLuma8(buf) => buf.pixels().map(|p| p.0[0] as f64).collect(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0] as f64).collect(),
        DynamicImage::ImageRgb8(buf) => buf
            .pixels()
            .map(|p| LUMA_R * p.0[0] as f64 + LUMA_G * p.0[1] as f64 + LUMA_B * p.0[2] as f64)
            .collect(),
        DynamicImage::ImageRgba8(buf) => buf
            .pixels()
            .map(|p| LUMA_R * p.0[0] as f64 + LUMA_G * p.0[1] as f64 + LUMA_B * p.0[2] as f64)
            .collect(),
        other => {
            return Err(IngestError::UnsupportedFormat {
                path: path.to_path_buf(),
                format: format!("{:?}", other.color()),
            })
        }
    };
    Ok((w, h, data))
}

/// Loads one frame file as a linear-intensity [`Frame`].
pub fn load_frame(path: &Path, timestamp: f64) -> Result<Frame, IngestError> {
    if !path.is_file() {
        return Err(IngestError::MissingFile { path: path.to_path_buf() });
    }
    let img = image::open(path)
        .map_err(|source| IngestError::ImageDecode { path: path.to_path_buf(), source })?;
    let (w, h, data) = image_to_intensities(&img, path)?;
    Ok(Frame::new(w, h, timestamp, data)?)
}

/// Parsed manifest records before any image IO.
fn parse_manifest(path: &Path) -> Result<Vec<(PathBuf, f64)>, IngestError> {
    let text = fs::read_to_string(path)
        .map_err(|source| IngestError::ManifestRead { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let rel = parts.next().expect("non-empty line has a first token");
        let ts = parts
            .next()
            .ok_or_else(|| IngestError::ManifestParse { line, msg: "missing timestamp".into() })?;
        if parts.next().is_some() {
            return Err(IngestError::ManifestParse { line, msg: "too many fields".into() });
        }
        let timestamp: f64 = ts.parse().map_err(|_| IngestError::ManifestParse {
            line,
            msg: format!("bad timestamp '{ts}'"),
        })?;
        records.push((base.join(rel), timestamp));
    }
    Ok(records)
}

/// Loads a full frame sequence described by a manifest file.
pub fn load_sequence(manifest_path: &Path) -> Result<FrameSource, IngestError> {
    let records = parse_manifest(manifest_path)?;
    let mut frames = Vec::with_capacity(records.len());
    for (path, timestamp) in &records {
        frames.push(load_frame(path, *timestamp)?);
    }
    Ok(FrameSource::new(frames)?)
}
