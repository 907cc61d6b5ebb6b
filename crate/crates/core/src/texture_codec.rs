//! Packing of an N×3 texture matrix into three square channel planes.
//!
//! Each column is zero-padded to `side²` entries with `side = ⌈√N⌉` and
//! reshaped column-major: `plane[r][c] = column[c·side + r]`. Non-finite
//! texture values become 0.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlaneSet<T> {
    pub side: usize,
    /// Red, green, blue.
    pub planes: [Matrix<T>; 3],
    pub pad_count: usize,
    pub original_rows: usize,
}

/// Smallest `side` with `side² ≥ n`.
pub fn plane_side(n: usize) -> usize {
    let mut side = (n as f64).sqrt() as usize;
    while side * side < n {
        side += 1;
    }
    while side > 0 && (side - 1) * (side - 1) >= n {
        side -= 1;
    }
    side
}

pub fn pack_texture<T: Real>(texture: &Matrix<T>) -> Result<ChannelPlaneSet<T>> {
    if texture.cols() != 3 {
        return Err(Error::Shape(format!(
            "texture must have 3 columns, got {}",
            texture.cols()
        )));
    }
    let n = texture.rows();
    if n == 0 {
        return Err(Error::Shape("texture has no rows".into()));
    }
    let side = plane_side(n);
    let plane = |ch: usize| {
        Matrix::from_fn(side, side, |r, c| {
            let idx = c * side + r;
            if idx < n {
                let v = texture[(idx, ch)];
                if v.is_finite() {
                    v
                } else {
                    T::zero()
                }
            } else {
                T::zero()
            }
        })
    };
    Ok(ChannelPlaneSet {
        side,
        planes: [plane(0), plane(1), plane(2)],
        pad_count: side * side - n,
        original_rows: n,
    })
}

pub fn unpack_texture<T: Real>(set: &ChannelPlaneSet<T>) -> Result<Matrix<T>> {
    let side = set.side;
    if side * side < set.original_rows {
        return Err(Error::Metadata(format!(
            "side {side} cannot hold {} rows",
            set.original_rows
        )));
    }
    if side * side != set.original_rows + set.pad_count {
        return Err(Error::Metadata(format!(
            "side² = {} but rows + pad = {}",
            side * side,
            set.original_rows + set.pad_count
        )));
    }
    if let Some(p) = set.planes.iter().find(|p| p.shape() != (side, side)) {
        return Err(Error::Shape(format!(
            "plane is {}x{}, expected {side}x{side}",
            p.rows(),
            p.cols()
        )));
    }
    Ok(Matrix::from_fn(set.original_rows, 3, |row, ch| {
        set.planes[ch][(row % side, row / side)]
    }))
}
