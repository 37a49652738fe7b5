// SPDX-License-Identifier: Apache-2.0

//! Uncompressed 24-bit BMP (BITMAPINFOHEADER). The encoding is a fixed
//! function of geometry, so every image of equal size has equal byte
//! length -- this is what the file-size-collapse control relies on.

use crate::image::ImageBuffer;
use crate::{Error, Result};

const FILE_HEADER_LEN: usize = 14;
const INFO_HEADER_LEN: usize = 40;

/// Padded byte length of one pixel row.
fn row_size(width: usize) -> usize {
    (width * 3 + 3) & !3
}

/// Total encoded size for a given geometry.
pub fn encoded_len(width: usize, height: usize) -> usize {
    FILE_HEADER_LEN + INFO_HEADER_LEN + row_size(width) * height
}

/// Encode as bottom-up 24-bit BMP with zeroed padding bytes.
pub fn encode(img: &ImageBuffer) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let total = encoded_len(w, h);
    let mut out = Vec::with_capacity(total);

    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(total as u32).to_le_bytes());
    out.extend_from_slice(&[0; 4]); // reserved
    out.extend_from_slice(&((FILE_HEADER_LEN + INFO_HEADER_LEN) as u32).to_le_bytes());

    out.extend_from_slice(&(INFO_HEADER_LEN as u32).to_le_bytes());
    out.extend_from_slice(&(w as i32).to_le_bytes());
    out.extend_from_slice(&(h as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // planes
    out.extend_from_slice(&24u16.to_le_bytes()); // bpp
    out.extend_from_slice(&0u32.to_le_bytes()); // BI_RGB
    out.extend_from_slice(&((row_size(w) * h) as u32).to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes()); // 72 dpi
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes()); // palette entries
    out.extend_from_slice(&0u32.to_le_bytes()); // important colors

    let pad = row_size(w) - w * 3;
    for y in (0..h).rev() {
        for x in 0..w {
            let [r, g, b] = img.pixel(x, y);
            out.push(b);
            out.push(g);
            out.push(r);
        }
        out.extend(std::iter::repeat_n(0u8, pad));
    }
    debug_assert_eq!(out.len(), total);
    out
}

fn corrupt(detail: impl Into<String>) -> Error {
    Error::CorruptFile { path: Default::default(), detail: detail.into() }
}

fn le_u32(b: &[u8], at: usize) -> Result<u32> {
    b.get(at..at + 4)
        .map(|s| u32::from_le_bytes(s.try_into().unwrap()))
        .ok_or_else(|| corrupt("truncated header"))
}

fn le_i32(b: &[u8], at: usize) -> Result<i32> {
    Ok(le_u32(b, at)? as i32)
}

fn le_u16(b: &[u8], at: usize) -> Result<u16> {
    b.get(at..at + 2)
        .map(|s| u16::from_le_bytes(s.try_into().unwrap()))
        .ok_or_else(|| corrupt("truncated header"))
}

/// Decode an uncompressed 24- or 32-bit BMP.
pub fn decode(data: &[u8]) -> Result<ImageBuffer> {
    if data.len() < FILE_HEADER_LEN + INFO_HEADER_LEN || &data[0..2] != b"BM" {
        return Err(Error::UnsupportedFormat("not a BMP file".into()));
    }
    let data_offset = le_u32(data, 10)? as usize;
    let header_size = le_u32(data, 14)? as usize;
    if header_size < INFO_HEADER_LEN {
        return Err(Error::UnsupportedFormat("BMP core header not supported".into()));
    }
    let width = le_i32(data, 18)?;
    let raw_height = le_i32(data, 22)?;
    let bpp = le_u16(data, 28)?;
    let compression = le_u32(data, 30)?;
    if compression != 0 {
        return Err(Error::UnsupportedFormat(format!(
            "compressed BMP (method {compression})"
        )));
    }
    if bpp != 24 && bpp != 32 {
        return Err(Error::UnsupportedFormat(format!("{bpp}-bit BMP")));
    }
    if width <= 0 || raw_height == 0 {
        return Err(corrupt("bad BMP dimensions"));
    }
    let w = width as usize;
    let top_down = raw_height < 0;
    let h = raw_height.unsigned_abs() as usize;

    let bytes_px = bpp as usize / 8;
    let row = (w * bytes_px + 3) & !3;
    if data.len() < data_offset + row * h {
        return Err(corrupt("truncated pixel data"));
    }

    let mut out = vec![0u8; w * h * 3];
    for y in 0..h {
        let sy = if top_down { y } else { h - 1 - y };
        let base = data_offset + sy * row;
        for x in 0..w {
            let s = base + x * bytes_px;
            let d = (y * w + x) * 3;
            out[d] = data[s + 2];
            out[d + 1] = data[s + 1];
            out[d + 2] = data[s];
        }
    }
    ImageBuffer::from_raw(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_pixel_identical() {
        let mut img = ImageBuffer::zeroed(5, 3);
        for (i, b) in img.data_mut().iter_mut().enumerate() {
            *b = (i * 17 % 256) as u8;
        }
        let decoded = decode(&encode(&img)).unwrap();
        assert_eq!(decoded, img);
    }

    #[test]
    fn encoded_len_is_geometry_only() {
        let a = ImageBuffer::filled(512, 512, 0);
        let b = ImageBuffer::filled(512, 512, 255);
        assert_eq!(encode(&a).len(), encode(&b).len());
        assert_eq!(encode(&a).len(), encoded_len(512, 512));
    }

    #[test]
    fn two_by_two_layout_is_exact() {
        // 2x2 with known samples; rows are 6 bytes padded to 8.
        let img = ImageBuffer::from_raw(
            2,
            2,
            vec![
                10, 20, 30, /* (0,0) */ 40, 50, 60, /* (1,0) */
                70, 80, 90, /* (0,1) */ 100, 110, 120, /* (1,1) */
            ],
        )
        .unwrap();
        let bytes = encode(&img);
        assert_eq!(bytes.len(), 14 + 40 + 2 * 8);
        // Bottom row first, BGR order, two zero pad bytes per row.
        assert_eq!(
            &bytes[54..],
            &[
                90, 80, 70, 120, 110, 100, 0, 0, // y = 1
                30, 20, 10, 60, 50, 40, 0, 0, // y = 0
            ]
        );
    }
}
