// SPDX-License-Identifier: Apache-2.0

//! Self-contained baseline JPEG codec.
//!
//! The codec is implemented in-tree so quantization tables, quality
//! scaling, subsampling, and rounding are pinned: the representation
//! controls require that equal inputs produce equal bytes on every
//! platform and worker count.

mod dct;
mod decoder;
mod encoder;
mod reference_fixture;
mod tables;

pub use decoder::decode;
pub use encoder::{encode, ChromaSubsampling};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ImageBuffer;

    #[test]
    fn flat_color_roundtrip_is_close() {
        let img = ImageBuffer::filled(24, 24, 200);
        let bytes = encode(&img, 95, ChromaSubsampling::S444).unwrap();
        let back = decode(&bytes).unwrap();
        for (a, b) in back.data().iter().zip(img.data()) {
            assert!((*a as i16 - *b as i16).abs() <= 2);
        }
    }

    #[test]
    fn rejects_progressive_marker() {
        // Minimal stream with a progressive SOF2 marker.
        let data = [0xff, 0xd8, 0xff, 0xc2, 0x00, 0x0b, 8, 0, 8, 0, 8, 1, 1, 0x11, 0];
        assert!(matches!(
            decode(&data),
            Err(crate::Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn rejects_truncated_stream() {
        let img = ImageBuffer::filled(16, 16, 90);
        let bytes = encode(&img, 80, ChromaSubsampling::S420).unwrap();
        let cut = &bytes[..bytes.len() / 2];
        assert!(decode(cut).is_err());
    }
}
