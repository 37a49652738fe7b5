// SPDX-License-Identifier: Apache-2.0

//! Byte-level container inventory: everything in a file that is not
//! pixel data, so class-correlated side channels can be ruled out.

use serde::{Deserialize, Serialize};

use super::ContainerFormat;
use crate::{Error, Result};

/// Complete inventory of non-pixel container content.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContainerReport {
    pub format: ContainerFormat,
    pub byte_size: u64,
    /// Every non-pixel chunk/segment present, as (name, byte length).
    pub ancillary_fields: Vec<(String, usize)>,
    pub has_color_profile: bool,
}

fn corrupt(detail: impl Into<String>) -> Error {
    Error::CorruptFile { path: Default::default(), detail: detail.into() }
}

/// Inventory a decodable image byte stream.
pub fn audit_bytes(data: &[u8]) -> Result<ContainerReport> {
    let format = super::sniff_format(data)
        .ok_or_else(|| Error::UnsupportedFormat("unknown container".into()))?;
    let (ancillary_fields, has_color_profile) = match format {
        ContainerFormat::Png => audit_png(data)?,
        ContainerFormat::Jpeg => audit_jpeg(data)?,
        ContainerFormat::Bmp => audit_bmp(data)?,
    };
    Ok(ContainerReport {
        format,
        byte_size: data.len() as u64,
        ancillary_fields,
        has_color_profile,
    })
}

/// PNG: every chunk outside the pixel-critical set is ancillary.
fn audit_png(data: &[u8]) -> Result<(Vec<(String, usize)>, bool)> {
    let mut fields = Vec::new();
    let mut has_icc = false;
    let mut pos = 8usize; // signature
    while pos + 8 <= data.len() {
        let len = u32::from_be_bytes(
            data[pos..pos + 4].try_into().map_err(|_| corrupt("bad chunk"))?,
        ) as usize;
        let name = std::str::from_utf8(&data[pos + 4..pos + 8])
            .map_err(|_| corrupt("non-ascii chunk name"))?
            .to_string();
        if pos + 12 + len > data.len() {
            return Err(corrupt(format!("truncated chunk {name}")));
        }
        match name.as_str() {
            "IHDR" | "PLTE" | "IDAT" | "IEND" => {}
            _ => {
                if name == "iCCP" {
                    has_icc = true;
                }
                fields.push((name.clone(), len));
            }
        }
        pos += 12 + len;
        if name == "IEND" {
            break;
        }
    }
    Ok((fields, has_icc))
}

/// JPEG: APPn/COM segments are metadata; tables and scan data are pixels.
fn audit_jpeg(data: &[u8]) -> Result<(Vec<(String, usize)>, bool)> {
    let mut fields = Vec::new();
    let mut has_icc = false;
    let mut pos = 2usize; // SOI
    while pos + 2 <= data.len() {
        if data[pos] != 0xff {
            return Err(corrupt("lost marker sync"));
        }
        let marker = data[pos + 1];
        pos += 2;
        match marker {
            0xd8 | 0x01 | 0xd0..=0xd7 => continue,
            0xd9 => break,
            0xda => break, // entropy-coded data follows; nothing ancillary after
            _ => {}
        }
        if pos + 2 > data.len() {
            return Err(corrupt("truncated segment header"));
        }
        let len = u16::from_be_bytes(data[pos..pos + 2].try_into().unwrap()) as usize;
        if len < 2 || pos + len > data.len() {
            return Err(corrupt("bad segment length"));
        }
        let body = &data[pos + 2..pos + len];
        match marker {
            0xe0..=0xef => {
                let n = (marker - 0xe0) as usize;
                if marker == 0xe2 && body.starts_with(b"ICC_PROFILE\0") {
                    has_icc = true;
                }
                fields.push((format!("APP{n}"), len - 2));
            }
            0xfe => fields.push(("COM".to_string(), len - 2)),
            _ => {}
        }
        pos += len;
    }
    Ok((fields, has_icc))
}

/// BMP: headers are fixed; report any gap or trailing bytes.
fn audit_bmp(data: &[u8]) -> Result<(Vec<(String, usize)>, bool)> {
    if data.len() < 54 {
        return Err(corrupt("truncated BMP header"));
    }
    let mut fields = Vec::new();
    let data_offset =
        u32::from_le_bytes(data[10..14].try_into().unwrap()) as usize;
    let header_size =
        u32::from_le_bytes(data[14..18].try_into().unwrap()) as usize;
    let expected_offset = 14 + header_size;
    if data_offset > expected_offset {
        fields.push(("header_gap".to_string(), data_offset - expected_offset));
    }
    Ok((fields, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ImageBuffer;

    #[test]
    fn canonical_png_has_no_ancillary_fields() {
        let img = ImageBuffer::filled(8, 8, 42);
        let bytes = crate::imageio::encode_png_canonical(&img).unwrap();
        let report = audit_bytes(&bytes).unwrap();
        assert!(report.ancillary_fields.is_empty());
        assert!(!report.has_color_profile);
        assert_eq!(report.byte_size, bytes.len() as u64);
    }

    #[test]
    fn injected_text_chunk_is_listed() {
        let img = ImageBuffer::filled(8, 8, 42);
        let clean = crate::imageio::encode_png_canonical(&img).unwrap();
        // Splice a tEXt chunk in front of IEND.
        let iend = clean.len() - 12;
        let payload = b"Label\0attacked";
        let mut chunk = Vec::new();
        chunk.extend_from_slice(&(payload.len() as u32).to_be_bytes());
        chunk.extend_from_slice(b"tEXt");
        chunk.extend_from_slice(payload);
        let crc = {
            // CRC over type + data, per the PNG spec.
            let mut c = crc32(&chunk[4..]);
            c = c.to_be();
            c.to_le_bytes()
        };
        chunk.extend_from_slice(&crc);
        let mut tampered = clean[..iend].to_vec();
        tampered.extend_from_slice(&chunk);
        tampered.extend_from_slice(&clean[iend..]);

        let report = audit_bytes(&tampered).unwrap();
        assert_eq!(report.ancillary_fields, vec![("tEXt".to_string(), payload.len())]);
    }

    #[test]
    fn bmp_report_is_empty_and_size_fixed() {
        let img = ImageBuffer::filled(512, 512, 7);
        let bytes = crate::imageio::encode_bmp(&img);
        let report = audit_bytes(&bytes).unwrap();
        assert!(report.ancillary_fields.is_empty());
        assert_eq!(report.byte_size as usize, crate::imageio::bmp::encoded_len(512, 512));
    }

    #[test]
    fn jpeg_app0_is_inventoried() {
        let img = ImageBuffer::filled(16, 16, 120);
        let bytes = crate::imageio::encode_jpeg(
            &img,
            90,
            crate::imageio::ChromaSubsampling::S420,
        )
        .unwrap();
        let report = audit_bytes(&bytes).unwrap();
        assert_eq!(report.ancillary_fields.len(), 1);
        assert_eq!(report.ancillary_fields[0].0, "APP0");
        assert!(!report.has_color_profile);
    }

    /// Reference CRC-32 (IEEE) used only to build the test fixture chunk.
    fn crc32(data: &[u8]) -> u32 {
        let mut table = [0u32; 256];
        for (i, t) in table.iter_mut().enumerate() {
            let mut c = i as u32;
            for _ in 0..8 {
                c = if c & 1 != 0 { 0xedb8_8320 ^ (c >> 1) } else { c >> 1 };
            }
            *t = c;
        }
        let mut crc = 0xffff_ffffu32;
        for &b in data {
            crc = table[((crc ^ b as u32) & 0xff) as usize] ^ (crc >> 8);
        }
        crc ^ 0xffff_ffff
    }
}
