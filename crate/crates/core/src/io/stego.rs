//! Lossless float64 container for stego images.
//!
//! The embedding perturbation is far below one 8-bit quantisation step, so
//! any integer format destroys it; extraction must read this container.

use std::path::Path;

use super::codec::{Reader, Writer};
use super::{read_file, write_file};
use crate::error::{Error, Result};
use crate::raster::Image;

pub const MAGIC: &[u8; 4] = b"STG1";

pub fn encode_stego(img: &Image<f64>) -> Vec<u8> {
    let (h, w) = img.dims();
    let mut out = Writer::new(MAGIC);
    out.u64(h as u64);
    out.u64(w as u64);
    out.u64(3);
    out.f64(img.peak());
    out.f64s(&img.to_interleaved());
    out.finish()
}

pub fn decode_stego(bytes: &[u8]) -> Result<Image<f64>> {
    let mut r = Reader::new(bytes, MAGIC)?;
    let h = r.usize()?;
    let w = r.usize()?;
    let c = r.usize()?;
    if h == 0 || w == 0 || c != 3 {
        return Err(Error::Dimension(format!("stego image is {h}x{w}x{c}")));
    }
    let peak = r.f64()?;
    let n = h
        .checked_mul(w)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Dimension(format!("{h}x{w}x3 overflows")))?;
    let samples = r.f64s(n)?;
    r.finish()?;
    Image::from_interleaved(h, w, &samples, peak)
}

pub fn save_stego(img: &Image<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_stego(img))
}

pub fn load_stego(path: impl AsRef<Path>) -> Result<Image<f64>> {
    decode_stego(&read_file(path.as_ref())?)
}
