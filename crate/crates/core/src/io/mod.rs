//! On-disk formats. All integers are `u64` and all samples `f64`, little-endian.
//!
//! | file        | layout                                                              |
//! |-------------|---------------------------------------------------------------------|
//! | matrix      | `"TXM1"`, rows, cols, row-major payload                             |
//! | stego image | `"STG1"`, H, W, 3, peak, payload in H, W, channel order             |
//! | key         | `"KEY1"`, α, side, pad count, peak, 3 × {Sc, Ut, Vt}, mode, family  |
//! | PCA model   | `"PCA1"`, kind byte, then matrix blocks (see [`models`])            |
//!
//! Inside a key, a vector is `len` followed by `len` values and a matrix is
//! `rows`, `cols`, payload. Mode and family are single bytes.

mod codec;
pub mod key;
pub mod matrix;
pub mod models;
pub mod png;
pub mod stego;

pub use key::{decode_key, encode_key, load_key, save_key};
pub use matrix::{decode_matrix, encode_matrix, load_matrix, save_matrix};
pub use models::{load_basis, load_pca_model, save_basis, save_pca_model};
pub use png::{export_png, import_png, load_image, PngDepth};
pub use stego::{decode_stego, encode_stego, load_stego, save_stego};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
