use std::path::Path;

use super::codec::{Reader, Writer};
use super::{read_file, write_file};
use crate::error::{Error, Result};
use crate::stego::{ChannelKey, ExtractionMode, StegoKey};
use crate::wavelet::WaveletFamily;

pub const MAGIC: &[u8; 4] = b"KEY1";

pub fn encode_key(key: &StegoKey<f64>) -> Vec<u8> {
    let mut w = Writer::new(MAGIC);
    w.f64(key.alpha);
    w.u64(key.side as u64);
    w.u64(key.pad_count as u64);
    w.f64(key.peak);
    for ch in &key.channels {
        w.vector(&ch.cover_sigma);
        w.matrix(&ch.texture_u);
        w.matrix(&ch.texture_v);
    }
    w.u8(key.mode.tag());
    w.u8(key.family.tag());
    w.finish()
}

/// Decodes and validates a key.
pub fn decode_key(bytes: &[u8]) -> Result<StegoKey<f64>> {
    let mut r = Reader::new(bytes, MAGIC)?;
    let alpha = r.f64()?;
    let side = r.usize()?;
    let pad_count = r.usize()?;
    let peak = r.f64()?;
    let mut channels = Vec::with_capacity(3);
    for _ in 0..3 {
        let cover_sigma = r.vector()?;
        let texture_u = r.matrix()?;
        let texture_v = r.matrix()?;
        channels.push(ChannelKey {
            cover_sigma,
            texture_u,
            texture_v,
        });
    }
    let mode_tag = r.u8()?;
    let mode = ExtractionMode::from_tag(mode_tag)
        .ok_or_else(|| Error::Key(format!("unknown extraction mode {mode_tag}")))?;
    let family_tag = r.u8()?;
    let family = WaveletFamily::from_tag(family_tag)
        .ok_or_else(|| Error::Key(format!("unknown wavelet family {family_tag}")))?;
    r.finish()?;
    let key = StegoKey {
        alpha,
        side,
        pad_count,
        peak,
        channels: channels.try_into().expect("three channels"),
        mode,
        family,
    };
    key.validate()?;
    Ok(key)
}

pub fn save_key(key: &StegoKey<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_key(key))
}

pub fn load_key(path: impl AsRef<Path>) -> Result<StegoKey<f64>> {
    decode_key(&read_file(path.as_ref())?)
}
