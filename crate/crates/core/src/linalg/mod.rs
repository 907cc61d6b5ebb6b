mod matrix;
mod svd;

pub use matrix::Matrix;
pub use svd::{svd, svd_thin, SvdTriple};
