// SPDX-License-Identifier: Apache-2.0

//! Canonical PNG export and PNG decode.
//!
//! The canonical form is 8-bit truecolor with a fixed filter (Paeth), a
//! fixed compression level, and zero ancillary chunks, so the same pixels
//! always produce the same bytes and no metadata survives re-export.

use crate::image::ImageBuffer;
use crate::{Error, Result};

fn corrupt(detail: impl std::fmt::Display) -> Error {
    Error::CorruptFile { path: Default::default(), detail: detail.to_string() }
}

/// Encode with the pinned canonical settings.
pub fn encode_canonical(img: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Default);
        enc.set_filter(png::FilterType::Paeth);
        enc.set_adaptive_filter(png::AdaptiveFilterType::NonAdaptive);
        let mut writer = enc.write_header().map_err(corrupt)?;
        writer.write_image_data(img.data()).map_err(corrupt)?;
    }
    Ok(out)
}

/// Decode any 8-bit PNG, expanding grayscale/palette and dropping alpha.
pub fn decode(data: &[u8]) -> Result<ImageBuffer> {
    let mut decoder = png::Decoder::new(data);
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| match e {
        png::DecodingError::Format(f) => corrupt(f),
        other => corrupt(other),
    })?;
    if reader.info().bit_depth == png::BitDepth::Sixteen {
        return Err(Error::UnsupportedFormat("16-bit PNG".into()));
    }
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(corrupt)?;
    let (w, h) = (info.width as usize, info.height as usize);
    buf.truncate(info.buffer_size());

    let rgb = match info.color_type {
        png::ColorType::Rgb => buf,
        png::ColorType::Rgba => {
            buf.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect()
        }
        png::ColorType::Grayscale => {
            buf.iter().flat_map(|&g| [g, g, g]).collect()
        }
        png::ColorType::GrayscaleAlpha => {
            buf.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]).collect()
        }
        // EXPAND converts indexed to RGB(A) already.
        png::ColorType::Indexed => {
            return Err(corrupt("palette PNG was not expanded"));
        }
    };
    ImageBuffer::from_raw(w, h, rgb)
}
