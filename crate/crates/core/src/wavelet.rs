//! Single-level separable 2-D DWT of three-channel images.
//!
//! For the Haar family and a 2×2 block `(a b; c d)`:
//!
//! ```text
//! CA = (a + b + c + d) / 2
//! CH = (a - b + c - d) / 2
//! CV = (a + b - c - d) / 2
//! CD = (a - b - c + d) / 2
//! ```
//!
//! i.e. rows are filtered first with the orthonormal pair `(1, ±1)/√2`, then
//! columns. CH holds the high-pass response along each row, CV along each
//! column.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::raster::Image;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    #[default]
    Haar,
}

impl WaveletFamily {
    pub fn tag(self) -> u8 {
        match self {
            WaveletFamily::Haar => 0,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(WaveletFamily::Haar),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WaveletFamily::Haar => "haar",
        }
    }

    pub fn is_orthonormal(self) -> bool {
        true
    }
}

/// Approximation and detail subbands, one matrix per channel each.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSet<T> {
    pub family: WaveletFamily,
    pub approx: [Matrix<T>; 3],
    pub horizontal: [Matrix<T>; 3],
    pub vertical: [Matrix<T>; 3],
    pub diagonal: [Matrix<T>; 3],
    /// Peak value carried over from the analysed image.
    pub peak: T,
}

impl<T: Real> SubbandSet<T> {
    pub fn dims(&self) -> (usize, usize) {
        self.approx[0].shape()
    }

    fn bands(&self) -> impl Iterator<Item = &Matrix<T>> {
        self.approx
            .iter()
            .chain(&self.horizontal)
            .chain(&self.vertical)
            .chain(&self.diagonal)
    }

    pub fn energy(&self) -> T {
        self.bands().map(|b| b.as_slice().iter().map(|&v| v * v).sum::<T>()).sum()
    }
}

pub fn dwt2<T: Real>(img: &Image<T>) -> Result<SubbandSet<T>> {
    dwt2_with(img, WaveletFamily::Haar)
}

pub fn dwt2_with<T: Real>(img: &Image<T>, family: WaveletFamily) -> Result<SubbandSet<T>> {
    let (h, w) = img.dims();
    if h < 2 || w < 2 || h % 2 != 0 || w % 2 != 0 {
        return Err(Error::Dimension(format!(
            "wavelet analysis needs even dimensions >= 2, got {h}x{w}"
        )));
    }
    let mut per_channel: Vec<[Matrix<T>; 4]> = img
        .planes()
        .par_iter()
        .map(|p| analyze_plane(p, family))
        .collect();
    let mut take = |band: usize| -> [Matrix<T>; 3] {
        std::array::from_fn(|ch| std::mem::replace(&mut per_channel[ch][band], Matrix::zeros(0, 0)))
    };
    Ok(SubbandSet {
        family,
        approx: take(0),
        horizontal: take(1),
        vertical: take(2),
        diagonal: take(3),
        peak: img.peak(),
    })
}

pub fn idwt2<T: Real>(set: &SubbandSet<T>) -> Result<Image<T>> {
    let dims = set.dims();
    if dims.0 == 0 || dims.1 == 0 {
        return Err(Error::Dimension("empty subbands".into()));
    }
    if set.bands().any(|b| b.shape() != dims) {
        return Err(Error::Shape("subbands differ in size".into()));
    }
    let planes: Vec<Matrix<T>> = (0..3)
        .into_par_iter()
        .map(|ch| {
            synthesize_plane(
                [
                    &set.approx[ch],
                    &set.horizontal[ch],
                    &set.vertical[ch],
                    &set.diagonal[ch],
                ],
                set.family,
            )
        })
        .collect();
    let [r, g, b]: [Matrix<T>; 3] = planes.try_into().expect("three channels");
    Image::new([r, g, b], set.peak)
}

/// `[CA, CH, CV, CD]` of one plane.
pub fn analyze_plane<T: Real>(plane: &Matrix<T>, family: WaveletFamily) -> [Matrix<T>; 4] {
    match family {
        WaveletFamily::Haar => haar_analyze(plane),
    }
}

pub fn synthesize_plane<T: Real>(bands: [&Matrix<T>; 4], family: WaveletFamily) -> Matrix<T> {
    match family {
        WaveletFamily::Haar => haar_synthesize(bands),
    }
}

fn haar_analyze<T: Real>(x: &Matrix<T>) -> [Matrix<T>; 4] {
    let (h, w) = (x.rows() / 2, x.cols() / 2);
    let half = T::lit(0.5);
    let mut out = [
        Matrix::zeros(h, w),
        Matrix::zeros(h, w),
        Matrix::zeros(h, w),
        Matrix::zeros(h, w),
    ];
    for i in 0..h {
        for j in 0..w {
            let a = x[(2 * i, 2 * j)];
            let b = x[(2 * i, 2 * j + 1)];
            let c = x[(2 * i + 1, 2 * j)];
            let d = x[(2 * i + 1, 2 * j + 1)];
            out[0][(i, j)] = (a + b + c + d) * half;
            out[1][(i, j)] = (a - b + c - d) * half;
            out[2][(i, j)] = (a + b - c - d) * half;
            out[3][(i, j)] = (a - b - c + d) * half;
        }
    }
    out
}

fn haar_synthesize<T: Real>([ca, ch, cv, cd]: [&Matrix<T>; 4]) -> Matrix<T> {
    let (h, w) = ca.shape();
    let half = T::lit(0.5);
    let mut x = Matrix::zeros(2 * h, 2 * w);
    for i in 0..h {
        for j in 0..w {
            let (s, hz, vt, dg) = (ca[(i, j)], ch[(i, j)], cv[(i, j)], cd[(i, j)]);
            x[(2 * i, 2 * j)] = (s + hz + vt + dg) * half;
            x[(2 * i, 2 * j + 1)] = (s - hz + vt - dg) * half;
            x[(2 * i + 1, 2 * j)] = (s + hz - vt - dg) * half;
            x[(2 * i + 1, 2 * j + 1)] = (s - hz - vt + dg) * half;
        }
    }
    x
}
