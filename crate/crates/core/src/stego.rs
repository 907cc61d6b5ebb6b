//! Singular-value embedding of a packed texture into the diagonal-detail
//! subband of a cover, and extraction with the resulting key.
//!
//! Per channel, with `CD = Uc·diag(Sc)·Vcᵀ` and texture plane
//! `P = Ut·diag(St)·Vtᵀ`:
//!
//! ```text
//! CDnew = Uc · diag(Sc + α·St) · Vcᵀ
//! ```
//!
//! Extraction decomposes the stego's diagonal subband again and recovers
//! `St = max((Se − Sc)/α, 0)`. Key-based extraction rebuilds the plane from
//! the stored `Ut`, `Vt`; literal extraction uses the stego's own
//! `Ue`, `Ve`, which only approximates the texture when the cover and
//! texture happen to share singular vectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix};
use crate::metrics::psnr;
use crate::raster::Image;
use crate::scalar::Real;
use crate::texture_codec::{pack_texture, unpack_texture, ChannelPlaneSet};
use crate::wavelet::{dwt2_with, idwt2, WaveletFamily};

pub const DEFAULT_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractionMode {
    /// Rebuild planes from the texture's own singular vectors stored in the key.
    #[default]
    KeyBased,
    /// Rebuild planes from the stego subband's singular vectors.
    Literal,
}

impl ExtractionMode {
    pub fn tag(self) -> u8 {
        match self {
            ExtractionMode::Literal => 0,
            ExtractionMode::KeyBased => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ExtractionMode::Literal),
            1 => Some(ExtractionMode::KeyBased),
            _ => None,
        }
    }
}

/// Side information for one colour channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelKey<T> {
    /// Singular values of the cover's diagonal subband, non-increasing.
    pub cover_sigma: Vec<T>,
    pub texture_u: Matrix<T>,
    pub texture_v: Matrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StegoKey<T> {
    pub alpha: T,
    pub side: usize,
    pub pad_count: usize,
    pub peak: T,
    pub channels: [ChannelKey<T>; 3],
    pub mode: ExtractionMode,
    pub family: WaveletFamily,
}

impl<T: Real> StegoKey<T> {
    pub fn original_rows(&self) -> usize {
        self.side * self.side - self.pad_count
    }

    /// Checks the structural invariants of a key.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return Err(Error::Key(format!("embedding strength {} is not positive", self.alpha)));
        }
        if self.side == 0 {
            return Err(Error::Key("plane side is zero".into()));
        }
        if self.pad_count >= (2 * self.side).saturating_sub(1).max(1) {
            return Err(Error::Key(format!(
                "pad count {} too large for side {}",
                self.pad_count, self.side
            )));
        }
        if !(self.peak > T::zero()) || !self.peak.is_finite() {
            return Err(Error::Key("peak value is not positive".into()));
        }
        let tol = T::lit(1e-9);
        for (ch, k) in self.channels.iter().enumerate() {
            if k.cover_sigma.len() != self.side {
                return Err(Error::Key(format!(
                    "channel {ch}: {} singular values for side {}",
                    k.cover_sigma.len(),
                    self.side
                )));
            }
            if k.cover_sigma.iter().any(|&s| !(s >= T::zero()) || !s.is_finite())
                || k.cover_sigma.windows(2).any(|w| w[1] > w[0])
            {
                return Err(Error::Key(format!(
                    "channel {ch}: cover singular values not non-increasing and non-negative"
                )));
            }
            for (name, m) in [("U", &k.texture_u), ("V", &k.texture_v)] {
                if m.shape() != (self.side, self.side) {
                    return Err(Error::Key(format!(
                        "channel {ch}: texture {name} is {}x{}, expected {side}x{side}",
                        m.rows(),
                        m.cols(),
                        side = self.side
                    )));
                }
                if !(m.orthogonality_error() <= tol) {
                    return Err(Error::Key(format!("channel {ch}: texture {name} is not orthogonal")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedParams<T> {
    pub alpha: T,
    pub mode: ExtractionMode,
    pub family: WaveletFamily,
}

impl<T: Real> Default for EmbedParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(DEFAULT_ALPHA),
            mode: ExtractionMode::default(),
            family: WaveletFamily::default(),
        }
    }
}

impl<T: Real> EmbedParams<T> {
    pub fn with_alpha(alpha: T) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }
}

/// Non-fatal conditions noticed during embedding.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum EmbedWarning {
    /// `α·max(St)` is not below half the smallest gap between consecutive
    /// cover singular values, so extraction is sensitive to any later
    /// perturbation of the stego.
    GapDominanceViolated {
        channel: usize,
        perturbation: f64,
        half_min_gap: f64,
    },
}

#[derive(Debug, Clone)]
pub struct EmbedResult<T> {
    pub stego: Image<T>,
    pub key: StegoKey<T>,
    pub psnr_db: T,
    pub warnings: Vec<EmbedWarning>,
}

/// Half the smallest gap between consecutive entries; `+∞` for fewer than two.
pub fn half_min_gap<T: Real>(sigma: &[T]) -> T {
    sigma
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(T::infinity(), T::min)
        * T::lit(0.5)
}

/// Embeds `texture` (N×3) into `cover`, which must be `2·side` square with
/// `side = ⌈√N⌉`; see [`prepare_cover`].
pub fn embed<T: Real>(
    cover: &Image<T>,
    texture: &Matrix<T>,
    params: EmbedParams<T>,
) -> Result<EmbedResult<T>> {
    let alpha = params.alpha;
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let packed = pack_texture(texture)?;
    let side = packed.side;
    let mut bands = dwt2_with(cover, params.family)?;
    if bands.dims() != (side, side) {
        return Err(Error::Shape(format!(
            "diagonal subband is {:?} but texture planes are {side}x{side}; cover must be {}x{}",
            bands.dims(),
            2 * side,
            2 * side
        )));
    }

    let channels: Vec<(Matrix<T>, ChannelKey<T>, Option<EmbedWarning>)> = (0..3)
        .into_par_iter()
        .map(|ch| -> Result<_> {
            let cover_svd = svd(&bands.diagonal[ch])?;
            let tex_svd = svd(&packed.planes[ch])?;
            let mixed: Vec<T> = cover_svd
                .sigma
                .iter()
                .zip(&tex_svd.sigma)
                .map(|(&c, &t)| c + alpha * t)
                .collect();
            let cd_new = Matrix::from_svd_parts(&cover_svd.u, &mixed, &cover_svd.v);
            let perturbation = alpha * tex_svd.sigma[0];
            let gap = half_min_gap(&cover_svd.sigma);
            let warning = (perturbation >= gap).then(|| EmbedWarning::GapDominanceViolated {
                channel: ch,
                perturbation: perturbation.as_f64(),
                half_min_gap: gap.as_f64(),
            });
            Ok((
                cd_new,
                ChannelKey {
                    cover_sigma: cover_svd.sigma,
                    texture_u: tex_svd.u,
                    texture_v: tex_svd.v,
                },
                warning,
            ))
        })
        .collect::<Result<_>>()?;

    let mut keys = Vec::with_capacity(3);
    let mut warnings = Vec::new();
    for (ch, (cd_new, key, warning)) in channels.into_iter().enumerate() {
        bands.diagonal[ch] = cd_new;
        keys.push(key);
        warnings.extend(warning);
    }
    let stego = idwt2(&bands)?;
    let psnr_db = psnr(cover, &stego)?;
    let key = StegoKey {
        alpha,
        side,
        pad_count: packed.pad_count,
        peak: cover.peak(),
        channels: keys.try_into().expect("three channels"),
        mode: params.mode,
        family: params.family,
    };
    Ok(EmbedResult {
        stego,
        key,
        psnr_db,
        warnings,
    })
}

/// Extracts with the mode recorded in the key.
pub fn extract<T: Real>(stego: &Image<T>, key: &StegoKey<T>) -> Result<Matrix<T>> {
    extract_with_mode(stego, key, key.mode)
}

pub fn extract_with_mode<T: Real>(
    stego: &Image<T>,
    key: &StegoKey<T>,
    mode: ExtractionMode,
) -> Result<Matrix<T>> {
    key.validate()?;
    let side = key.side;
    if stego.dims() != (2 * side, 2 * side) {
        return Err(Error::Shape(format!(
            "stego is {:?}, key expects {}x{}",
            stego.dims(),
            2 * side,
            2 * side
        )));
    }
    let bands = dwt2_with(stego, key.family)?;
    let planes: Vec<Matrix<T>> = (0..3)
        .into_par_iter()
        .map(|ch| -> Result<Matrix<T>> {
            let k = &key.channels[ch];
            let stego_svd = svd(&bands.diagonal[ch])?;
            let recovered: Vec<T> = stego_svd
                .sigma
                .iter()
                .zip(&k.cover_sigma)
                .map(|(&e, &c)| ((e - c) / key.alpha).max(T::zero()))
                .collect();
            Ok(match mode {
                ExtractionMode::KeyBased => {
                    Matrix::from_svd_parts(&k.texture_u, &recovered, &k.texture_v)
                }
                ExtractionMode::Literal => {
                    Matrix::from_svd_parts(&stego_svd.u, &recovered, &stego_svd.v)
                }
            })
        })
        .collect::<Result<_>>()?;
    let planes: [Matrix<T>; 3] = planes.try_into().expect("three channels");
    unpack_texture(&ChannelPlaneSet {
        side,
        planes,
        pad_count: key.pad_count,
        original_rows: key.original_rows(),
    })
}

/// Bilinear resample to `(2·side)×(2·side)` using pixel-centre alignment.
pub fn prepare_cover<T: Real>(img: &Image<T>, side: usize) -> Result<Image<T>> {
    if side == 0 {
        return Err(Error::Parameter("side must be at least 1".into()));
    }
    let (h, w) = img.dims();
    if h == 0 || w == 0 {
        return Err(Error::Dimension("cannot resample an empty image".into()));
    }
    let out = 2 * side;
    if (h, w) == (out, out) {
        return Ok(img.clone());
    }
    let axis = |src: usize| -> Vec<(usize, usize, T)> {
        let scale = src as f64 / out as f64;
        (0..out)
            .map(|i| {
                let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
                let lo = pos.floor() as usize;
                let hi = (lo + 1).min(src - 1);
                (lo, hi, T::lit(pos - lo as f64))
            })
            .collect()
    };
    let ys = axis(h);
    let xs = axis(w);
    let resample = |p: &Matrix<T>| {
        Matrix::from_fn(out, out, |r, c| {
            let (y0, y1, fy) = ys[r];
            let (x0, x1, fx) = xs[c];
            let top = p[(y0, x0)] + (p[(y0, x1)] - p[(y0, x0)]) * fx;
            let bottom = p[(y1, x0)] + (p[(y1, x1)] - p[(y1, x0)]) * fx;
            top + (bottom - top) * fy
        })
    };
    let planes = img.planes();
    Image::new(
        [resample(&planes[0]), resample(&planes[1]), resample(&planes[2])],
        img.peak(),
    )
}
