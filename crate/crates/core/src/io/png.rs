//! PNG import/export. Export quantises, so a PNG stego cannot be extracted
//! reliably; use the `STG1` container for that.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, Rgb};

use super::read_file;
use crate::error::{Error, Result};
use crate::raster::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PngDepth {
    Eight,
    Sixteen,
}

impl PngDepth {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(PngDepth::Eight),
            16 => Ok(PngDepth::Sixteen),
            other => Err(Error::Parameter(format!("PNG depth must be 8 or 16, got {other}"))),
        }
    }

    pub fn max_value(self) -> f64 {
        match self {
            PngDepth::Eight => 255.0,
            PngDepth::Sixteen => 65535.0,
        }
    }
}

/// Imports an 8- or 16-bit PNG with peak `2^depth − 1`. Grey images are
/// replicated to three channels and alpha is dropped.
pub fn import_png(path: impl AsRef<Path>) -> Result<Image<f64>> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    let decoded = image::load_from_memory_with_format(&bytes, ImageFormat::Png)
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
    from_dynamic(decoded)
}

fn from_dynamic(img: DynamicImage) -> Result<Image<f64>> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (samples, peak): (Vec<f64>, f64) = match img {
        DynamicImage::ImageRgb8(buf) => (buf.into_raw().into_iter().map(f64::from).collect(), 255.0),
        DynamicImage::ImageRgb16(buf) => {
            (buf.into_raw().into_iter().map(f64::from).collect(), 65535.0)
        }
        img @ (DynamicImage::ImageLuma8(_) | DynamicImage::ImageRgba8(_)) => (
            img.to_rgb8().into_raw().into_iter().map(f64::from).collect(),
            255.0,
        ),
        img @ (DynamicImage::ImageLuma16(_) | DynamicImage::ImageRgba16(_)) => (
            img.to_rgb16().into_raw().into_iter().map(f64::from).collect(),
            65535.0,
        ),
        other => {
            return Err(Error::UnsupportedChannels(format!("{:?}", other.color())));
        }
    };
    Image::from_interleaved(h, w, &samples, peak)
}

/// Quantises one sample: rescale to the target depth, round half away from
/// zero, clamp.
pub fn quantize(sample: f64, peak: f64, depth: PngDepth) -> f64 {
    let max = depth.max_value();
    (sample * (max / peak)).round().clamp(0.0, max)
}

/// Writes a PNG at the given depth. Samples are rescaled from the image's
/// peak to `2^depth − 1` first.
pub fn export_png(img: &Image<f64>, depth: PngDepth, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (h, w) = img.dims();
    let q: Vec<f64> = img
        .to_interleaved()
        .into_iter()
        .map(|s| quantize(s, img.peak(), depth))
        .collect();
    let result = match depth {
        PngDepth::Eight => {
            let buf: ImageBuffer<Rgb<u8>, _> =
                ImageBuffer::from_raw(w as u32, h as u32, q.iter().map(|&v| v as u8).collect::<Vec<u8>>())
                    .expect("buffer sized to image");
            buf.save_with_format(path, ImageFormat::Png)
        }
        PngDepth::Sixteen => {
            let buf: ImageBuffer<Rgb<u16>, _> =
                ImageBuffer::from_raw(w as u32, h as u32, q.iter().map(|&v| v as u16).collect::<Vec<u16>>())
                    .expect("buffer sized to image");
            buf.save_with_format(path, ImageFormat::Png)
        }
    };
    result.map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Image(format!("{}: {other}", path.display())),
    })
}

/// Loads either a `STG1` container or a PNG, by content.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image<f64>> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    if bytes.starts_with(super::stego::MAGIC) {
        super::stego::decode_stego(&bytes)
    } else {
        let decoded = image::load_from_memory_with_format(&bytes, ImageFormat::Png)
            .map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
        from_dynamic(decoded)
    }
}
