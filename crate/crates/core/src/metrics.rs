//! MSE and PSNR between images of equal size.
//!
//! MSE averages over every sample of all three channels jointly.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::raster::Image;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport {
    pub mse: f64,
    /// `+∞` for identical images; serialized as the string `"inf"`.
    #[serde(serialize_with = "serialize_db")]
    pub psnr_db: f64,
    pub peak: f64,
}

impl QualityReport {
    pub fn is_identical(&self) -> bool {
        self.psnr_db == f64::INFINITY
    }
}

/// Finite values as JSON numbers, `+∞` as `"inf"`.
pub fn serialize_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn check_dims<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::Shape(format!(
            "images are {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

pub fn mse<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<T> {
    check_dims(a, b)?;
    let (h, w) = a.dims();
    let mut total = T::zero();
    for ch in 0..3 {
        total += a
            .plane(ch)
            .as_slice()
            .iter()
            .zip(b.plane(ch).as_slice())
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum::<T>();
    }
    Ok(total / T::from_usize_lossy(h * w * 3))
}

/// `−10·log₁₀(MSE / S²)`; `+∞` when the images are identical.
pub fn psnr<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<T> {
    if a.peak() != b.peak() {
        return Err(Error::Parameter(format!(
            "peak values differ: {} vs {}",
            a.peak(),
            b.peak()
        )));
    }
    let m = mse(a, b)?;
    Ok(psnr_from_mse(m, a.peak()))
}

pub fn psnr_from_mse<T: Real>(mse: T, peak: T) -> T {
    if mse == T::zero() {
        T::infinity()
    } else {
        -T::lit(10.0) * (mse / (peak * peak)).log10()
    }
}

pub fn quality_report<T: Real>(a: &Image<T>, b: &Image<T>) -> Result<QualityReport> {
    let psnr_db = psnr(a, b)?;
    Ok(QualityReport {
        mse: mse(a, b)?.as_f64(),
        psnr_db: psnr_db.as_f64(),
        peak: a.peak().as_f64(),
    })
}
