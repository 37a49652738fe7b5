// SPDX-License-Identifier: Apache-2.0

//! Image container I/O: decode, deterministic encode, and container audit.
//!
//! Everything here is pure with respect to shared state and safe to call
//! from many workers concurrently.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::image::ImageBuffer;
use crate::{Error, Result};

mod audit;
pub mod bmp;
pub mod jpeg;
pub mod png;

pub use audit::{audit_bytes, ContainerReport};
pub use jpeg::ChromaSubsampling;

/// Supported container formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContainerFormat {
    Png,
    Jpeg,
    Bmp,
}

/// Identify a container from its magic bytes.
pub fn sniff_format(data: &[u8]) -> Option<ContainerFormat> {
    if data.starts_with(&[0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a]) {
        Some(ContainerFormat::Png)
    } else if data.starts_with(&[0xff, 0xd8]) {
        Some(ContainerFormat::Jpeg)
    } else if data.starts_with(b"BM") {
        Some(ContainerFormat::Bmp)
    } else {
        None
    }
}

/// Decode PNG, JPEG, or BMP bytes to an 8-bit RGB buffer.
///
/// Grayscale and paletted inputs are expanded to RGB; alpha is dropped.
pub fn decode_bytes(data: &[u8]) -> Result<ImageBuffer> {
    match sniff_format(data) {
        Some(ContainerFormat::Png) => png::decode(data),
        Some(ContainerFormat::Jpeg) => jpeg::decode(data),
        Some(ContainerFormat::Bmp) => bmp::decode(data),
        None => Err(Error::UnsupportedFormat("unrecognized magic bytes".into())),
    }
}

/// Attach the offending path to a decode error.
fn with_path(err: Error, path: &Path) -> Error {
    match err {
        Error::CorruptFile { detail, .. } => {
            Error::CorruptFile { path: path.to_path_buf(), detail }
        }
        other => other,
    }
}

/// Decode an image file.
pub fn decode(path: &Path) -> Result<ImageBuffer> {
    let data = std::fs::read(path)?;
    decode_bytes(&data).map_err(|e| with_path(e, path))
}

/// Encode as uncompressed 24-bit BMP (constant size at fixed geometry).
pub fn encode_bmp(img: &ImageBuffer) -> Vec<u8> {
    bmp::encode(img)
}

/// Encode as canonical PNG: fixed filter and compression level, zero
/// ancillary chunks, no color profile.
pub fn encode_png_canonical(img: &ImageBuffer) -> Result<Vec<u8>> {
    png::encode_canonical(img)
}

/// Encode as baseline sequential JPEG with pinned tables.
pub fn encode_jpeg(
    img: &ImageBuffer,
    quality: u8,
    subsampling: ChromaSubsampling,
) -> Result<Vec<u8>> {
    jpeg::encode(img, quality, subsampling)
}

/// Inventory the non-pixel content of an image file.
pub fn audit(path: &Path) -> Result<ContainerReport> {
    let data = std::fs::read(path)?;
    audit_bytes(&data).map_err(|e| with_path(e, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patterned(w: usize, h: usize, salt: u8) -> ImageBuffer {
        let mut img = ImageBuffer::zeroed(w, h);
        for (i, b) in img.data_mut().iter_mut().enumerate() {
            *b = ((i as u32 * 31 + salt as u32 * 7) % 256) as u8;
        }
        img
    }

    #[test]
    fn bmp_roundtrip_and_png_roundtrip_are_identity() {
        let img = patterned(20, 11, 3);
        assert_eq!(decode_bytes(&encode_bmp(&img)).unwrap(), img);
        assert_eq!(
            decode_bytes(&encode_png_canonical(&img).unwrap()).unwrap(),
            img
        );
    }

    #[test]
    fn unknown_magic_is_unsupported() {
        assert!(matches!(
            decode_bytes(b"GIF89a\0\0\0"),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn jpeg_quality_bounds_are_checked() {
        let img = patterned(8, 8, 0);
        assert!(matches!(
            encode_jpeg(&img, 0, ChromaSubsampling::S444),
            Err(Error::InvalidQuality(0))
        ));
        assert!(encode_jpeg(&img, 1, ChromaSubsampling::S444).is_ok());
    }

    #[test]
    fn jpeg_q100_flat_gray_is_near_lossless() {
        let img = ImageBuffer::filled(32, 32, 128);
        let bytes = encode_jpeg(&img, 100, ChromaSubsampling::S444).unwrap();
        let back = decode_bytes(&bytes).unwrap();
        for (a, b) in back.data().iter().zip(img.data()) {
            assert!((*a as i16 - *b as i16).abs() <= 1);
        }
    }

    #[test]
    fn jpeg_encode_is_deterministic() {
        let img = patterned(48, 33, 9);
        let a = encode_jpeg(&img, 75, ChromaSubsampling::S420).unwrap();
        let b = encode_jpeg(&img, 75, ChromaSubsampling::S420).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jpeg_roundtrip_all_subsamplings_decode() {
        let img = patterned(40, 24, 5);
        for sub in [
            ChromaSubsampling::S444,
            ChromaSubsampling::S422,
            ChromaSubsampling::S420,
        ] {
            let bytes = encode_jpeg(&img, 85, sub).unwrap();
            let back = decode_bytes(&bytes).unwrap();
            assert_eq!(back.width(), 40);
            assert_eq!(back.height(), 24);
        }
    }

    #[test]
    fn decode_zero_png_is_all_zero() {
        let img = ImageBuffer::zeroed(512, 512);
        let bytes = encode_png_canonical(&img).unwrap();
        let back = decode_bytes(&bytes).unwrap();
        assert!(back.data().iter().all(|&b| b == 0));
        assert_eq!(back.width(), 512);
    }

    #[test]
    fn psnr_nondecreasing_in_quality() {
        let img = crate::synth::textured(64, 64, 77);
        let mut last = 0.0f64;
        for q in [50u8, 75, 90, 100] {
            let bytes = encode_jpeg(&img, q, ChromaSubsampling::S420).unwrap();
            let back = decode_bytes(&bytes).unwrap();
            let stats = crate::ops::distortion_stats(&img, &back).unwrap();
            assert!(
                stats.psnr >= last,
                "psnr({q}) = {} < previous {last}",
                stats.psnr
            );
            last = stats.psnr;
        }
    }
}
