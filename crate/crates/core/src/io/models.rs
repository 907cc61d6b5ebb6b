//! PCA model files: `"PCA1"`, a kind byte, then complete `TXM1` blocks.
//!
//! * kind 0, per-matrix model: mean (1×p), coeff (p×p), score (N×p),
//!   explained variance (p×1).
//! * kind 1, morphable basis: sample count, mean (N×3), singular values
//!   (k×1), component count `r`, then `r` component blocks (N×3).

use std::path::Path;

use super::codec::{Reader, Writer};
use super::matrix::{decode_matrix_prefix, encode_matrix};
use super::{read_file, write_file};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::morphable::{BasisModel, PcaModel};

pub const MAGIC: &[u8; 4] = b"PCA1";
const KIND_PCA: u8 = 0;
const KIND_BASIS: u8 = 1;

fn column(values: &[f64]) -> Result<Matrix<f64>> {
    Matrix::from_vec(values.len(), 1, values.to_vec())
}

struct Blocks<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Blocks<'_> {
    fn next(&mut self) -> Result<Matrix<f64>> {
        let (m, used) = decode_matrix_prefix(&self.bytes[self.pos..])?;
        self.pos += used;
        Ok(m)
    }

    fn u64(&mut self) -> Result<usize> {
        let raw = self
            .bytes
            .get(self.pos..self.pos + 8)
            .ok_or(Error::Truncated {
                expected: self.pos + 8,
                found: self.bytes.len(),
            })?;
        self.pos += 8;
        let v = u64::from_le_bytes(raw.try_into().unwrap());
        usize::try_from(v).map_err(|_| Error::Dimension(format!("{v} does not fit in memory")))
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Dimension(format!(
                "{} unexpected trailing bytes",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn open(bytes: &[u8], kind: u8) -> Result<Blocks<'_>> {
    let mut r = Reader::new(bytes, MAGIC)?;
    let found = r.u8()?;
    if found != kind {
        return Err(Error::Dimension(format!("model kind {found}, expected {kind}")));
    }
    Ok(Blocks {
        bytes,
        pos: r.position(),
    })
}

pub fn encode_pca_model(model: &PcaModel<f64>) -> Result<Vec<u8>> {
    let mut w = Writer::new(MAGIC);
    w.u8(KIND_PCA);
    w.bytes(&encode_matrix(&Matrix::from_vec(1, model.mean.len(), model.mean.clone())?)?);
    w.bytes(&encode_matrix(&model.coeff)?);
    w.bytes(&encode_matrix(&model.score)?);
    w.bytes(&encode_matrix(&column(&model.explained_variance)?)?);
    Ok(w.finish())
}

pub fn decode_pca_model(bytes: &[u8]) -> Result<PcaModel<f64>> {
    let mut b = open(bytes, KIND_PCA)?;
    let mean = b.next()?;
    let coeff = b.next()?;
    let score = b.next()?;
    let variance = b.next()?;
    b.finish()?;
    let p = coeff.cols();
    if mean.shape() != (1, p) || coeff.rows() != p || score.cols() != p || variance.shape() != (p, 1)
    {
        return Err(Error::Dimension("inconsistent PCA model blocks".into()));
    }
    Ok(PcaModel {
        mean: mean.into_vec(),
        coeff,
        score,
        explained_variance: variance.into_vec(),
    })
}

pub fn encode_basis(model: &BasisModel<f64>) -> Result<Vec<u8>> {
    let mut w = Writer::new(MAGIC);
    w.u8(KIND_BASIS);
    w.u64(model.sample_count as u64);
    w.bytes(&encode_matrix(&model.mean)?);
    w.bytes(&encode_matrix(&column(&model.singular_values)?)?);
    w.u64(model.components.len() as u64);
    for c in &model.components {
        w.bytes(&encode_matrix(c)?);
    }
    Ok(w.finish())
}

pub fn decode_basis(bytes: &[u8]) -> Result<BasisModel<f64>> {
    let mut b = open(bytes, KIND_BASIS)?;
    let sample_count = b.u64()?;
    let mean = b.next()?;
    let sigma = b.next()?;
    let r = b.u64()?;
    let mut components = Vec::new();
    for _ in 0..r {
        let c = b.next()?;
        if c.shape() != mean.shape() {
            return Err(Error::Dimension("component shape differs from mean".into()));
        }
        components.push(c);
    }
    b.finish()?;
    if sigma.cols() != 1 || r > sigma.rows() {
        return Err(Error::Dimension("inconsistent basis blocks".into()));
    }
    Ok(BasisModel {
        mean,
        components,
        singular_values: sigma.into_vec(),
        sample_count,
    })
}

pub fn save_pca_model(model: &PcaModel<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_pca_model(model)?)
}

pub fn load_pca_model(path: impl AsRef<Path>) -> Result<PcaModel<f64>> {
    decode_pca_model(&read_file(path.as_ref())?)
}

pub fn save_basis(model: &BasisModel<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_basis(model)?)
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<BasisModel<f64>> {
    decode_basis(&read_file(path.as_ref())?)
}
