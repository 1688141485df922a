//! Accumulation images: signed event counts over a window, rendered as a
//! red/blue-on-gray PNG for quick visual inspection.

use std::path::Path;

use adv2e_core::{EventStream, Polarity};
use image::{Rgb, RgbImage};

/// Display clip: counts beyond +-3 render like +-3.
pub const CLIP: i64 = 3;
const NEUTRAL: [u8; 3] = [128, 128, 128];
const POS_FULL: [u8; 3] = [255, 0, 0];
const NEG_FULL: [u8; 3] = [0, 0, 255];

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("window end {t1} must be later than start {t0}")]
    InvalidWindow { t0: f64, t1: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cannot encode image: {0}")]
    Encode(#[from] image::ImageError),
}

/// Signed per-pixel event counts inside `[t0, t1]`, row-major.
pub fn accumulate(stream: &EventStream, t0: f64, t1: f64) -> Result<Vec<i64>, RenderError> {
    if t1 <= t0 || !t0.is_finite() || !t1.is_finite() {
        return Err(RenderError::InvalidWindow { t0, t1 });
    }
    let mut counts = vec![0i64; stream.width() as usize * stream.height() as usize];
    for ev in stream.events() {
        if ev.t < t0 || ev.t > t1 {
            continue;
        }
        let idx = ev.y as usize * stream.width() as usize + ev.x as usize;
        counts[idx] += match ev.polarity {
            Polarity::Pos => 1,
            Polarity::Neg => -1,
        };
    }
    Ok(counts)
}

/// Color for a signed count: neutral gray at zero, blending toward pure
/// red (positive) or blue (negative), saturating at the clip value.
pub fn count_color(count: i64) -> [u8; 3] {
    if count == 0 {
        return NEUTRAL;
    }
    let toward = if count > 0 { POS_FULL } else { NEG_FULL };
    let strength = (count.unsigned_abs().min(CLIP as u64)) as f64 / CLIP as f64;
    let mut color = [0u8; 3];
    for c in 0..3 {
        let v = NEUTRAL[c] as f64 + (toward[c] as f64 - NEUTRAL[c] as f64) * strength;
        color[c] = v.round() as u8;
    }
    color
}

/// Renders the accumulation image for `[t0, t1]` into an RGB buffer.
pub fn render_accumulation(stream: &EventStream, t0: f64, t1: f64) -> Result<RgbImage, RenderError> {
    let counts = accumulate(stream, t0, t1)?;
    let width = stream.width();
    let mut img = RgbImage::new(width, stream.height());
    for (idx, &count) in counts.iter().enumerate() {
        let x = (idx as u32) % width;
        let y = (idx as u32) / width;
        img.put_pixel(x, y, Rgb(count_color(count)));
    }
    Ok(img)
}

/// Renders and writes a PNG.
pub fn render_accumulation_to(
    stream: &EventStream,
    t0: f64,
    t1: f64,
    path: &Path,
) -> Result<(), RenderError> {
    let img = render_accumulation(stream, t0, t1)?;
    img.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use adv2e_core::Event;

    fn stream_with(events: Vec<Event>) -> EventStream {
        EventStream::from_events(4, 3, events).unwrap()
    }

    #[test]
    fn empty_window_renders_neutral() {
        let s = stream_with(vec![Event { x: 0, y: 0, t: 5.0, polarity: Polarity::Pos }]);
        let img = render_accumulation(&s, 0.0, 1.0).unwrap();
        assert!(img.pixels().all(|p| p.0 == NEUTRAL));
    }

    #[test]
    fn single_event_touches_exactly_one_pixel() {
        let s = stream_with(vec![Event { x: 2, y: 1, t: 0.5, polarity: Polarity::Pos }]);
        let img = render_accumulation(&s, 0.0, 1.0).unwrap();
        let non_neutral: Vec<_> = img
            .enumerate_pixels()
            .filter(|(_, _, p)| p.0 != NEUTRAL)
            .collect();
        assert_eq!(non_neutral.len(), 1);
        assert_eq!((non_neutral[0].0, non_neutral[0].1), (2, 1));
        // positive accumulation leans red
        assert!(non_neutral[0].2 .0[0] > NEUTRAL[0]);
    }

    #[test]
    fn counts_clip_at_three() {
        let five = |n: i64| {
            let events = (0..n)
                .map(|i| Event {
                    x: 0,
                    y: 0,
                    t: 0.1 * (i as f64 + 1.0),
                    polarity: Polarity::Pos,
                })
                .collect();
            let s = stream_with(events);
            render_accumulation(&s, 0.0, 1.0).unwrap().get_pixel(0, 0).0
        };
        assert_eq!(five(5), five(3));
        assert_eq!(five(3), POS_FULL);
        assert_ne!(five(2), five(3));
    }

    #[test]
    fn negative_counts_lean_blue() {
        let s = stream_with(vec![
            Event { x: 1, y: 2, t: 0.2, polarity: Polarity::Neg },
            Event { x: 1, y: 2, t: 0.4, polarity: Polarity::Neg },
            Event { x: 1, y: 2, t: 0.6, polarity: Polarity::Neg },
        ]);
        let img = render_accumulation(&s, 0.0, 1.0).unwrap();
        assert_eq!(img.get_pixel(1, 2).0, NEG_FULL);
    }

    #[test]
    fn invalid_window_is_rejected() {
        let s = stream_with(vec![]);
        assert!(matches!(
            accumulate(&s, 1.0, 1.0),
            Err(RenderError::InvalidWindow { .. })
        ));
    }
}
