//! Three-channel floating point images.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// H×W×3 image stored as one plane per channel, with the declared peak
/// sample value `S` used by PSNR.
///
/// Covers are expected to lie in `[0, S]`, but samples are not clamped: a
/// stego image may leave that range by the embedding perturbation and must
/// survive storage unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    planes: [Matrix<T>; 3],
    peak: T,
}

impl<T: Real> Image<T> {
    pub fn new(planes: [Matrix<T>; 3], peak: T) -> Result<Self> {
        let shape = planes[0].shape();
        if planes.iter().any(|p| p.shape() != shape) {
            return Err(Error::Shape("channel planes differ in size".into()));
        }
        if shape.0 == 0 || shape.1 == 0 {
            return Err(Error::Dimension("image has a zero dimension".into()));
        }
        if !(peak > T::zero()) || !peak.is_finite() {
            return Err(Error::Parameter(format!("peak value must be positive, got {peak}")));
        }
        Ok(Self { planes, peak })
    }

    /// Constant image, every sample equal to `value`.
    pub fn filled(height: usize, width: usize, value: T, peak: T) -> Result<Self> {
        let plane = Matrix::from_fn(height, width, |_, _| value);
        Self::new([plane.clone(), plane.clone(), plane], peak)
    }

    /// From samples in H, W, channel order (channel fastest).
    pub fn from_interleaved(height: usize, width: usize, samples: &[T], peak: T) -> Result<Self> {
        if samples.len() != height * width * 3 {
            return Err(Error::Dimension(format!(
                "{height}x{width}x3 image needs {} samples, got {}",
                height * width * 3,
                samples.len()
            )));
        }
        let plane = |ch: usize| Matrix::from_fn(height, width, |r, c| samples[(r * width + c) * 3 + ch]);
        Self::new([plane(0), plane(1), plane(2)], peak)
    }

    pub fn to_interleaved(&self) -> Vec<T> {
        let (h, w) = self.dims();
        let mut out = Vec::with_capacity(h * w * 3);
        for r in 0..h {
            for c in 0..w {
                for p in &self.planes {
                    out.push(p[(r, c)]);
                }
            }
        }
        out
    }

    pub fn height(&self) -> usize {
        self.planes[0].rows()
    }

    pub fn width(&self) -> usize {
        self.planes[0].cols()
    }

    /// `(height, width)`.
    pub fn dims(&self) -> (usize, usize) {
        self.planes[0].shape()
    }

    pub fn peak(&self) -> T {
        self.peak
    }

    pub fn plane(&self, channel: usize) -> &Matrix<T> {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Matrix<T>; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [Matrix<T>; 3] {
        self.planes
    }

    pub fn sample(&self, row: usize, col: usize, channel: usize) -> T {
        self.planes[channel][(row, col)]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            planes: [self.planes[0].map(&f), self.planes[1].map(&f), self.planes[2].map(&f)],
            peak: self.peak,
        }
    }

    pub fn with_peak(mut self, peak: T) -> Result<Self> {
        if !(peak > T::zero()) || !peak.is_finite() {
            return Err(Error::Parameter(format!("peak value must be positive, got {peak}")));
        }
        self.peak = peak;
        Ok(self)
    }
}
