use std::path::Path;

use super::codec::{Reader, Writer};
use super::{read_file, write_file};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MAGIC: &[u8; 4] = b"TXM1";

pub fn encode_matrix(m: &Matrix<f64>) -> Result<Vec<u8>> {
    if m.is_empty() {
        return Err(Error::Dimension(format!("cannot store a {}x{} matrix", m.rows(), m.cols())));
    }
    let mut w = Writer::new(MAGIC);
    w.u64(m.rows() as u64);
    w.u64(m.cols() as u64);
    w.f64s(m.as_slice());
    Ok(w.finish())
}

pub fn decode_matrix(bytes: &[u8]) -> Result<Matrix<f64>> {
    let mut r = Reader::new(bytes, MAGIC)?;
    let m = r.matrix()?;
    r.finish()?;
    Ok(m)
}

/// Reads one `TXM1` block from the front of `bytes`, returning it and the
/// number of bytes consumed.
pub(crate) fn decode_matrix_prefix(bytes: &[u8]) -> Result<(Matrix<f64>, usize)> {
    let mut r = Reader::new(bytes, MAGIC)?;
    let m = r.matrix()?;
    Ok((m, r.position()))
}

pub fn save_matrix(m: &Matrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_matrix(m)?)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix<f64>> {
    decode_matrix(&read_file(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_fixed() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, -0.0]]).unwrap();
        let bytes = encode_matrix(&m).unwrap();
        let mut expected = b"TXM1".to_vec();
        expected.extend_from_slice(&3u64.to_le_bytes());
        expected.extend_from_slice(&2u64.to_le_bytes());
        for v in [1.0f64, 2.0, 3.0, 4.0, 5.0, -0.0] {
            expected.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(bytes, expected);
        let back = decode_matrix(&bytes).unwrap();
        assert_eq!(encode_matrix(&back).unwrap(), bytes);
    }

    #[test]
    fn distinct_failures() {
        let bytes = encode_matrix(&Matrix::<f64>::identity(2)).unwrap();
        assert!(matches!(
            decode_matrix(&bytes[..bytes.len() - 3]),
            Err(Error::Truncated { .. })
        ));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_matrix(&bad), Err(Error::BadMagic { .. })));
        let mut zero_rows = b"TXM1".to_vec();
        zero_rows.extend_from_slice(&0u64.to_le_bytes());
        zero_rows.extend_from_slice(&3u64.to_le_bytes());
        assert!(matches!(decode_matrix(&zero_rows), Err(Error::Dimension(_))));
        let mut long = bytes;
        long.extend_from_slice(&[0; 8]);
        assert!(matches!(decode_matrix(&long), Err(Error::Dimension(_))));
        assert!(matches!(decode_matrix(b"TX"), Err(Error::BadMagic { .. })));
    }
}
