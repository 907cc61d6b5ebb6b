//! Hiding 3-D face textures in cover images with a single-level Haar DWT and
//! per-channel singular-value embedding, plus PCA tools for building and
//! combining shape/texture models.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`). File formats
//! are fixed to little-endian `f64`, so the on-disk helpers in [`io`] work
//! with the `f64` aliases exported here.

pub mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod morphable;
pub mod raster;
pub mod scalar;
pub mod stego;
pub mod texture_codec;
pub mod wavelet;

pub use error::{Error, Result};
pub use linalg::{svd, svd_thin, Matrix, SvdTriple};
pub use metrics::{mse, psnr, quality_report, QualityReport};
pub use morphable::{
    build_basis, combine_average, combine_faces, compute_mean, linear_combine, pca_fit,
    reexpress, synth_dataset, synthesize, AlsOptions, BasisModel, Combination, FaceSample,
    MissingPolicy, PcaModel,
};
pub use raster::Image;
pub use scalar::Real;
pub use stego::{
    embed, extract, extract_with_mode, prepare_cover, ChannelKey, EmbedParams, EmbedResult,
    EmbedWarning, ExtractionMode, StegoKey,
};
pub use texture_codec::{pack_texture, unpack_texture, ChannelPlaneSet};
pub use wavelet::{dwt2, dwt2_with, idwt2, SubbandSet, WaveletFamily};

/// Dense `f64` matrix; the layout of texture and shape files.
pub type Mat = Matrix<f64>;
/// Dense `f32` matrix.
pub type Mat32 = Matrix<f32>;
/// Three-channel `f64` image with a declared peak value.
pub type FloatImage = Image<f64>;
/// Three-channel `f32` image.
pub type FloatImage32 = Image<f32>;
/// Extraction key as stored on disk.
pub type KeyFile = StegoKey<f64>;
/// N×3 per-vertex RGB values.
pub type TextureMatrix = Mat;
/// N×3 per-vertex xyz coordinates.
pub type ShapeMatrix = Mat;
