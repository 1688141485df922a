//! Timestamped frame sequences and inter-frame interpolation.

use alloc::vec::Vec;

use crate::math::lerp;
use crate::types::{Frame, FrameError};

/// Errors from building or resampling a [`FrameSource`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SourceError {
    #[error("need at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("frame {index} is {width}x{height}, expected {expected_width}x{expected_height}")]
    GeometryMismatch {
        index: usize,
        width: u32,
        height: u32,
        expected_width: u32,
        expected_height: u32,
    },
    #[error("timestamps must be strictly increasing (frame {index}: {t} after {prev})")]
    NonMonotonicTimestamps { index: usize, t: f64, prev: f64 },
    #[error("frame {index} holds a negative intensity {value}")]
    NegativeIntensity { index: usize, value: f64 },
    #[error("interpolation factor must be >= 1, got {0}")]
    InvalidFactor(u32),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// A validated sequence of same-sized frames with strictly increasing
/// timestamps, the simulator's input unit.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSource {
    frames: Vec<Frame>,
}

impl FrameSource {
    pub fn new(frames: Vec<Frame>) -> Result<Self, SourceError> {
        if frames.len() < 2 {
            return Err(SourceError::TooFewFrames(frames.len()));
        }
        let (w, h) = (frames[0].width(), frames[0].height());
        for (index, frame) in frames.iter().enumerate() {
            if frame.width() != w || frame.height() != h {
                return Err(SourceError::GeometryMismatch {
                    index,
                    width: frame.width(),
                    height: frame.height(),
                    expected_width: w,
                    expected_height: h,
                });
            }
            if index > 0 && frame.timestamp <= frames[index - 1].timestamp {
                return Err(SourceError::NonMonotonicTimestamps {
                    index,
                    t: frame.timestamp,
                    prev: frames[index - 1].timestamp,
                });
            }
            if let Some(&value) = frame.data().iter().find(|v| **v < 0.0) {
                return Err(SourceError::NegativeIntensity { index, value });
            }
        }
        Ok(FrameSource { frames })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least two frames
    }

    pub fn width(&self) -> u32 {
        self.frames[0].width()
    }

    pub fn height(&self) -> u32 {
        self.frames[0].height()
    }

    /// Interval between the first two frames, in seconds.
    pub fn base_interval(&self) -> f64 {
        self.frames[1].timestamp - self.frames[0].timestamp
    }

    /// Nominal frame rate `1 / base_interval`, in Hz.
    pub fn base_rate(&self) -> f64 {
        1.0 / self.base_interval()
    }

    pub fn first_timestamp(&self) -> f64 {
        self.frames[0].timestamp
    }

    pub fn last_timestamp(&self) -> f64 {
        self.frames[self.frames.len() - 1].timestamp
    }

    /// Uniform linear upsampling by `factor`.
    ///
    /// Each adjacent pair contributes `factor` frames blended at fractions
    /// `l / factor`; the final input frame is appended as the terminal
    /// sample, so the output holds `(N - 1) * factor + 1` frames. Blending
    /// happens in linear intensity, ahead of any log transformation.
    pub fn interpolate_linear(&self, factor: u32) -> Result<FrameSource, SourceError> {
        if factor < 1 {
            return Err(SourceError::InvalidFactor(factor));
        }
        let mut out = Vec::with_capacity((self.frames.len() - 1) * factor as usize + 1);
        for pair in self.frames.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let gap = b.timestamp - a.timestamp;
            for l in 0..factor {
                let w = l as f64 / factor as f64;
                let t = a.timestamp + gap * w;
                let data: Vec<f64> = a
                    .data()
                    .iter()
                    .zip(b.data())
                    .map(|(&va, &vb)| lerp(va, vb, w))
                    .collect();
                out.push(Frame::new(a.width(), a.height(), t, data)?);
            }
        }
        out.push(self.frames[self.frames.len() - 1].clone());
        FrameSource::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn frame(t: f64, values: &[f64]) -> Frame {
        Frame::new(values.len() as u32, 1, t, values.to_vec()).unwrap()
    }

    #[test]
    fn two_frame_minimum_and_base_interval() {
        let src = FrameSource::new(vec![frame(0.0, &[0.0]), frame(1.0 / 30.0, &[1.0])]).unwrap();
        assert!((src.base_interval() - 1.0 / 30.0).abs() < 1e-15);
        assert!((src.base_rate() - 30.0).abs() < 1e-9);

        let err = FrameSource::new(vec![frame(0.0, &[0.0])]).unwrap_err();
        assert!(matches!(err, SourceError::TooFewFrames(1)));
    }

    #[test]
    fn equal_timestamps_are_rejected() {
        let err = FrameSource::new(vec![frame(0.0, &[0.0]), frame(0.0, &[1.0])]).unwrap_err();
        assert!(matches!(err, SourceError::NonMonotonicTimestamps { index: 1, .. }));
    }

    #[test]
    fn geometry_mismatch_is_rejected() {
        let a = Frame::filled(64, 48, 0.0, 0.0).unwrap();
        let b = Frame::filled(32, 24, 1.0, 0.0).unwrap();
        let err = FrameSource::new(vec![a, b]).unwrap_err();
        assert!(matches!(err, SourceError::GeometryMismatch { index: 1, width: 32, .. }));
    }

    #[test]
    fn negative_intensity_is_rejected() {
        let err =
            FrameSource::new(vec![frame(0.0, &[-0.5]), frame(1.0, &[1.0])]).unwrap_err();
        assert!(matches!(err, SourceError::NegativeIntensity { index: 0, .. }));
    }

    #[test]
    fn interpolation_identity_at_factor_one() {
        let src = FrameSource::new(vec![
            frame(0.0, &[0.0, 10.0]),
            frame(0.5, &[5.0, 20.0]),
            frame(1.0, &[9.0, 0.0]),
        ])
        .unwrap();
        let out = src.interpolate_linear(1).unwrap();
        assert_eq!(out, src);
    }

    #[test]
    fn interpolation_blend_values_factor_four() {
        let src = FrameSource::new(vec![frame(0.0, &[0.0]), frame(1.0, &[255.0])]).unwrap();
        let out = src.interpolate_linear(4).unwrap();
        let values: Vec<f64> = out.frames().iter().map(|f| f.get(0, 0)).collect();
        let times: Vec<f64> = out.frames().iter().map(|f| f.timestamp).collect();
        assert_eq!(values, vec![0.0, 63.75, 127.5, 191.25, 255.0]);
        assert_eq!(times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn interpolation_output_count() {
        let src = FrameSource::new(vec![
            frame(0.0, &[0.0]),
            frame(1.0, &[10.0]),
            frame(2.0, &[20.0]),
        ])
        .unwrap();
        let out = src.interpolate_linear(10).unwrap();
        assert_eq!(out.len(), 21);
    }

    #[test]
    fn interpolation_rejects_zero_factor() {
        let src = FrameSource::new(vec![frame(0.0, &[0.0]), frame(1.0, &[1.0])]).unwrap();
        assert!(matches!(src.interpolate_linear(0), Err(SourceError::InvalidFactor(0))));
    }

    #[test]
    fn interpolation_reproduces_inputs_exactly() {
        let src = FrameSource::new(vec![
            frame(0.125, &[3.0, 7.5]),
            frame(0.25, &[200.0, 0.1]),
            frame(0.375, &[55.0, 199.9]),
        ])
        .unwrap();
        let out = src.interpolate_linear(4).unwrap();
        for (n, original) in src.frames().iter().enumerate() {
            let slot = &out.frames()[n * 4];
            assert_eq!(slot, original, "slot l=0 of pair {n} must be bit-exact");
        }
    }
}
