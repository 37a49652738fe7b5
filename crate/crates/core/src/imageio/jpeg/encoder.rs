// SPDX-License-Identifier: Apache-2.0

//! Baseline sequential JPEG encoder with pinned tables.
//!
//! Always emits interleaved three-component YCbCr with Annex K
//! quantization tables scaled by the linear quality rule and the standard
//! Huffman tables. Equal inputs produce equal byte streams.

use super::dct;
use super::tables::*;
use crate::image::ImageBuffer;
use crate::{Error, Result};

/// Chroma subsampling mode of the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ChromaSubsampling {
    /// No chroma subsampling (1x1).
    S444,
    /// Horizontal halving (2x1).
    S422,
    /// Horizontal and vertical halving (2x2).
    S420,
}

impl ChromaSubsampling {
    /// Luma (h, v) sampling factors; chroma is always (1, 1).
    fn luma_factors(self) -> (usize, usize) {
        match self {
            ChromaSubsampling::S444 => (1, 1),
            ChromaSubsampling::S422 => (2, 1),
            ChromaSubsampling::S420 => (2, 2),
        }
    }
}

struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl BitWriter {
    fn new() -> Self {
        Self { out: Vec::new(), acc: 0, nbits: 0 }
    }

    fn put(&mut self, code: u32, len: u32) {
        debug_assert!(len <= 16);
        self.acc = (self.acc << len) | (code & ((1u32 << len) - 1));
        self.nbits += len;
        while self.nbits >= 8 {
            let byte = ((self.acc >> (self.nbits - 8)) & 0xff) as u8;
            self.out.push(byte);
            if byte == 0xff {
                self.out.push(0x00);
            }
            self.nbits -= 8;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.put((1u32 << pad) - 1, pad);
        }
        self.out
    }
}

/// Bit length of |v| (JPEG magnitude category).
#[inline]
fn category(v: i32) -> u32 {
    (32 - v.unsigned_abs().leading_zeros()) as u32
}

/// One image plane with its padded geometry.
struct Plane {
    data: Vec<f64>,
    width: usize,
    height: usize,
}

impl Plane {
    #[inline]
    fn get(&self, x: usize, y: usize) -> f64 {
        // Edge replication for the padded region.
        let xc = x.min(self.width - 1);
        let yc = y.min(self.height - 1);
        self.data[yc * self.width + xc]
    }
}

fn rgb_to_ycbcr_planes(img: &ImageBuffer) -> [Plane; 3] {
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let mut y = vec![0.0f64; n];
    let mut cb = vec![0.0f64; n];
    let mut cr = vec![0.0f64; n];
    for (i, px) in img.data().chunks_exact(3).enumerate() {
        let (r, g, b) = (px[0] as f64, px[1] as f64, px[2] as f64);
        y[i] = 0.299 * r + 0.587 * g + 0.114 * b;
        cb[i] = 128.0 - 0.168_735_892 * r - 0.331_264_108 * g + 0.5 * b;
        cr[i] = 128.0 + 0.5 * r - 0.418_687_589 * g - 0.081_312_411 * b;
    }
    [
        Plane { data: y, width: w, height: h },
        Plane { data: cb, width: w, height: h },
        Plane { data: cr, width: w, height: h },
    ]
}

/// Box-average subsample by integer factors, clamping partial edges.
fn subsample(p: &Plane, fh: usize, fv: usize) -> Plane {
    if fh == 1 && fv == 1 {
        return Plane { data: p.data.clone(), width: p.width, height: p.height };
    }
    let w = p.width.div_ceil(fh);
    let h = p.height.div_ceil(fv);
    let mut data = vec![0.0f64; w * h];
    for oy in 0..h {
        for ox in 0..w {
            let mut acc = 0.0;
            let mut cnt = 0.0;
            for dy in 0..fv {
                for dx in 0..fh {
                    let sx = ox * fh + dx;
                    let sy = oy * fv + dy;
                    if sx < p.width && sy < p.height {
                        acc += p.data[sy * p.width + sx];
                        cnt += 1.0;
                    }
                }
            }
            data[oy * w + ox] = acc / cnt;
        }
    }
    Plane { data, width: w, height: h }
}

struct ComponentState {
    plane: Plane,
    h: usize,
    v: usize,
    quant: [u16; 64],
    dc_table: [(u16, u8); 256],
    ac_table: [(u16, u8); 256],
    dc_pred: i32,
}

fn encode_block(
    comp: &mut ComponentState,
    bx: usize,
    by: usize,
    writer: &mut BitWriter,
) {
    let mut block = [0.0f64; 64];
    for y in 0..8 {
        for x in 0..8 {
            block[y * 8 + x] = comp.plane.get(bx * 8 + x, by * 8 + y) - 128.0;
        }
    }
    let coefs = dct::forward(&block);

    // Quantize in zigzag order.
    let mut q = [0i32; 64];
    for (k, qk) in q.iter_mut().enumerate() {
        let nat = ZIGZAG[k];
        *qk = (coefs[nat] / comp.quant[nat] as f64).round() as i32;
    }

    // DC difference.
    let diff = q[0] - comp.dc_pred;
    comp.dc_pred = q[0];
    let s = category(diff);
    let (code, len) = comp.dc_table[s as usize];
    writer.put(code as u32, len as u32);
    if s > 0 {
        let bits = if diff < 0 { diff + (1 << s) - 1 } else { diff };
        writer.put(bits as u32, s);
    }

    // AC run-length coding.
    let mut run = 0u32;
    for &coef in q.iter().skip(1) {
        if coef == 0 {
            run += 1;
            continue;
        }
        while run >= 16 {
            let (zc, zl) = comp.ac_table[0xf0];
            writer.put(zc as u32, zl as u32);
            run -= 16;
        }
        let s = category(coef);
        let symbol = ((run << 4) | s) as usize;
        let (code, len) = comp.ac_table[symbol];
        debug_assert!(len > 0, "missing AC code for symbol {symbol:#x}");
        writer.put(code as u32, len as u32);
        let bits = if coef < 0 { coef + (1 << s) - 1 } else { coef };
        writer.put(bits as u32, s);
        run = 0;
    }
    if run > 0 {
        let (code, len) = comp.ac_table[0x00];
        writer.put(code as u32, len as u32);
    }
}

fn push_marker(out: &mut Vec<u8>, marker: u8) {
    out.push(0xff);
    out.push(marker);
}

fn push_segment(out: &mut Vec<u8>, marker: u8, payload: &[u8]) {
    push_marker(out, marker);
    let len = (payload.len() + 2) as u16;
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(payload);
}

/// Encode an RGB buffer as baseline sequential JPEG.
pub fn encode(
    img: &ImageBuffer,
    quality: u8,
    subsampling: ChromaSubsampling,
) -> Result<Vec<u8>> {
    if quality < 1 || quality > 100 {
        return Err(Error::InvalidQuality(quality as i64));
    }
    let (hf, vf) = subsampling.luma_factors();
    let luma_qt = scaled_quant_table(&BASE_LUMA_QT, quality);
    let chroma_qt = scaled_quant_table(&BASE_CHROMA_QT, quality);

    let [yp, cbp, crp] = rgb_to_ycbcr_planes(img);
    let dc_luma = build_encode_table(&STD_DC_LUMA);
    let ac_luma = build_encode_table(&STD_AC_LUMA);
    let dc_chroma = build_encode_table(&STD_DC_CHROMA);
    let ac_chroma = build_encode_table(&STD_AC_CHROMA);

    let mut comps = [
        ComponentState {
            plane: yp,
            h: hf,
            v: vf,
            quant: luma_qt,
            dc_table: dc_luma,
            ac_table: ac_luma,
            dc_pred: 0,
        },
        ComponentState {
            plane: subsample(&cbp, hf, vf),
            h: 1,
            v: 1,
            quant: chroma_qt,
            dc_table: dc_chroma,
            ac_table: ac_chroma,
            dc_pred: 0,
        },
        ComponentState {
            plane: subsample(&crp, hf, vf),
            h: 1,
            v: 1,
            quant: chroma_qt,
            dc_table: dc_chroma,
            ac_table: ac_chroma,
            dc_pred: 0,
        },
    ];

    let mcu_w = 8 * hf;
    let mcu_h = 8 * vf;
    let mcus_x = img.width().div_ceil(mcu_w);
    let mcus_y = img.height().div_ceil(mcu_h);

    let mut writer = BitWriter::new();
    for my in 0..mcus_y {
        for mx in 0..mcus_x {
            for comp in comps.iter_mut() {
                for by in 0..comp.v {
                    for bx in 0..comp.h {
                        encode_block(
                            comp,
                            mx * comp.h + bx,
                            my * comp.v + by,
                            &mut writer,
                        );
                    }
                }
            }
        }
    }
    let scan = writer.finish();

    let mut out = Vec::with_capacity(scan.len() + 1024);
    push_marker(&mut out, 0xd8); // SOI

    // APP0 / JFIF 1.1, unit-less 1:1 density, no thumbnail.
    push_segment(
        &mut out,
        0xe0,
        &[b'J', b'F', b'I', b'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0],
    );

    // DQT: both tables in one segment, 8-bit precision, zigzag order.
    let mut dqt = Vec::with_capacity(130);
    for (id, table) in [(0u8, &luma_qt), (1u8, &chroma_qt)] {
        dqt.push(id);
        for k in 0..64 {
            dqt.push(table[ZIGZAG[k]] as u8);
        }
    }
    push_segment(&mut out, 0xdb, &dqt);

    // SOF0: baseline, 8-bit samples, 3 components.
    let mut sof = vec![8u8];
    sof.extend_from_slice(&(img.height() as u16).to_be_bytes());
    sof.extend_from_slice(&(img.width() as u16).to_be_bytes());
    sof.push(3);
    sof.extend_from_slice(&[1, ((hf as u8) << 4) | vf as u8, 0]);
    sof.extend_from_slice(&[2, 0x11, 1]);
    sof.extend_from_slice(&[3, 0x11, 1]);
    push_segment(&mut out, 0xc0, &sof);

    // DHT: all four standard tables in one segment.
    let mut dht = Vec::new();
    for (class_id, spec) in [
        (0x00u8, &STD_DC_LUMA),
        (0x10, &STD_AC_LUMA),
        (0x01, &STD_DC_CHROMA),
        (0x11, &STD_AC_CHROMA),
    ] {
        dht.push(class_id);
        dht.extend_from_slice(&spec.bits);
        dht.extend_from_slice(spec.values);
    }
    push_segment(&mut out, 0xc4, &dht);

    // SOS: Y uses tables 0/0, chroma 1/1.
    push_segment(&mut out, 0xda, &[3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0]);

    out.extend_from_slice(&scan);
    push_marker(&mut out, 0xd9); // EOI
    Ok(out)
}
