// SPDX-License-Identifier: Apache-2.0

//! Baseline sequential JPEG decoder (SOF0/SOF1, Huffman entropy coding,
//! optional restart markers). Progressive and arithmetic-coded streams are
//! rejected as unsupported.

use super::dct;
use super::tables::ZIGZAG;
use crate::image::{clamp_u8, ImageBuffer};
use crate::{Error, Result};

fn corrupt(detail: impl Into<String>) -> Error {
    Error::CorruptFile { path: Default::default(), detail: detail.into() }
}

/// Huffman decode table in the canonical min/max-code form.
struct HuffDecoder {
    min_code: [i32; 17],
    max_code: [i32; 17],
    val_ptr: [usize; 17],
    values: Vec<u8>,
}

impl HuffDecoder {
    fn from_spec(bits: &[u8; 16], values: Vec<u8>) -> Self {
        let mut min_code = [0i32; 17];
        let mut max_code = [-1i32; 17];
        let mut val_ptr = [0usize; 17];
        let mut code = 0i32;
        let mut k = 0usize;
        for len in 1..=16usize {
            let count = bits[len - 1] as usize;
            if count > 0 {
                val_ptr[len] = k;
                min_code[len] = code;
                code += count as i32;
                max_code[len] = code - 1;
                k += count;
            }
            code <<= 1;
        }
        Self { min_code, max_code, val_ptr, values }
    }
}

struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u32,
    nbits: u32,
    /// Set when a non-RST marker is reached inside the scan.
    at_marker: bool,
}

impl<'a> BitReader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0, acc: 0, nbits: 0, at_marker: false }
    }

    /// Pull one byte of entropy-coded data, unstuffing 0xFF00.
    fn next_byte(&mut self) -> Result<u8> {
        if self.at_marker {
            return Err(corrupt("entropy data ended at marker"));
        }
        let b = *self
            .data
            .get(self.pos)
            .ok_or_else(|| corrupt("truncated entropy data"))?;
        self.pos += 1;
        if b != 0xff {
            return Ok(b);
        }
        match self.data.get(self.pos) {
            Some(0x00) => {
                self.pos += 1;
                Ok(0xff)
            }
            _ => {
                // Marker inside the scan; expose it to the caller.
                self.pos -= 1;
                self.at_marker = true;
                Err(corrupt("entropy data ended at marker"))
            }
        }
    }

    fn read_bit(&mut self) -> Result<u32> {
        if self.nbits == 0 {
            let b = self.next_byte()?;
            self.acc = b as u32;
            self.nbits = 8;
        }
        self.nbits -= 1;
        Ok((self.acc >> self.nbits) & 1)
    }

    fn read_bits(&mut self, n: u32) -> Result<i32> {
        let mut v = 0i32;
        for _ in 0..n {
            v = (v << 1) | self.read_bit()? as i32;
        }
        Ok(v)
    }

    fn decode_symbol(&mut self, table: &HuffDecoder) -> Result<u8> {
        let mut code = 0i32;
        for len in 1..=16usize {
            code = (code << 1) | self.read_bit()? as i32;
            if table.max_code[len] >= 0 && code <= table.max_code[len] {
                let idx = table.val_ptr[len] + (code - table.min_code[len]) as usize;
                return table
                    .values
                    .get(idx)
                    .copied()
                    .ok_or_else(|| corrupt("huffman code out of range"));
            }
        }
        Err(corrupt("invalid huffman code"))
    }

    /// Byte-align and consume an expected RSTn marker.
    fn consume_restart(&mut self) -> Result<()> {
        self.nbits = 0;
        self.at_marker = false;
        if self.pos + 1 >= self.data.len() {
            return Err(corrupt("truncated at restart marker"));
        }
        let (a, b) = (self.data[self.pos], self.data[self.pos + 1]);
        if a != 0xff || !(0xd0..=0xd7).contains(&b) {
            return Err(corrupt(format!("expected RST marker, got {a:02x}{b:02x}")));
        }
        self.pos += 2;
        Ok(())
    }
}

#[inline]
fn extend(v: i32, s: u32) -> i32 {
    if s == 0 {
        0
    } else if v < (1 << (s - 1)) {
        v - (1 << s) + 1
    } else {
        v
    }
}

struct Component {
    id: u8,
    h: usize,
    v: usize,
    quant_id: usize,
    dc_id: usize,
    ac_id: usize,
    dc_pred: i32,
    /// Decoded plane at the component's own (subsampled) resolution,
    /// padded to whole MCUs.
    plane: Vec<f64>,
    plane_w: usize,
    plane_h: usize,
}

struct Parser<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn u8(&mut self) -> Result<u8> {
        let b = *self.data.get(self.pos).ok_or_else(|| corrupt("truncated"))?;
        self.pos += 1;
        Ok(b)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(((self.u8()? as u16) << 8) | self.u8()? as u16)
    }

    fn slice(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(corrupt("truncated segment"));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}

/// Decode a baseline JPEG byte stream to an RGB buffer.
pub fn decode(data: &[u8]) -> Result<ImageBuffer> {
    let mut p = Parser { data, pos: 0 };
    if p.u16()? != 0xffd8 {
        return Err(Error::UnsupportedFormat("missing JPEG SOI".into()));
    }

    let mut quant: [Option<[u16; 64]>; 4] = [None; 4];
    let mut dc_tables: Vec<Option<HuffDecoder>> = (0..4).map(|_| None).collect();
    let mut ac_tables: Vec<Option<HuffDecoder>> = (0..4).map(|_| None).collect();
    let mut frame: Option<(usize, usize, Vec<Component>)> = None;
    let mut restart_interval = 0usize;

    loop {
        // Seek the next marker, tolerating fill bytes.
        let mut marker = p.u8()?;
        if marker != 0xff {
            return Err(corrupt(format!("expected marker, got {marker:02x}")));
        }
        while marker == 0xff {
            marker = p.u8()?;
        }
        match marker {
            0xd9 => return Err(corrupt("EOI before scan data")),
            0x01 | 0xd0..=0xd7 => continue, // standalone markers
            0xc0 | 0xc1 => {
                let len = p.u16()? as usize;
                let seg = p.slice(len.checked_sub(2).ok_or_else(|| corrupt("bad SOF length"))?)?;
                let mut s = Parser { data: seg, pos: 0 };
                let precision = s.u8()?;
                if precision != 8 {
                    return Err(Error::UnsupportedFormat(format!(
                        "JPEG precision {precision} (only 8-bit supported)"
                    )));
                }
                let height = s.u16()? as usize;
                let width = s.u16()? as usize;
                if width == 0 || height == 0 {
                    return Err(corrupt("zero frame dimensions"));
                }
                let ncomp = s.u8()? as usize;
                if ncomp != 1 && ncomp != 3 {
                    return Err(Error::UnsupportedFormat(format!(
                        "JPEG with {ncomp} components"
                    )));
                }
                let mut comps = Vec::with_capacity(ncomp);
                for _ in 0..ncomp {
                    let id = s.u8()?;
                    let hv = s.u8()?;
                    let (h, v) = ((hv >> 4) as usize, (hv & 0xf) as usize);
                    if h == 0 || v == 0 || h > 4 || v > 4 {
                        return Err(corrupt("bad sampling factors"));
                    }
                    let quant_id = s.u8()? as usize;
                    comps.push(Component {
                        id,
                        h,
                        v,
                        quant_id,
                        dc_id: 0,
                        ac_id: 0,
                        dc_pred: 0,
                        plane: Vec::new(),
                        plane_w: 0,
                        plane_h: 0,
                    });
                }
                frame = Some((width, height, comps));
            }
            0xc2 | 0xc3 | 0xc5..=0xc7 | 0xc9..=0xcb | 0xcd..=0xcf => {
                return Err(Error::UnsupportedFormat(
                    "non-baseline JPEG (progressive or arithmetic)".into(),
                ));
            }
            0xc4 => {
                let len = p.u16()? as usize;
                let seg = p.slice(len.checked_sub(2).ok_or_else(|| corrupt("bad DHT length"))?)?;
                let mut s = Parser { data: seg, pos: 0 };
                while s.pos < seg.len() {
                    let tc_th = s.u8()?;
                    let class = tc_th >> 4;
                    let id = (tc_th & 0xf) as usize;
                    if class > 1 || id > 3 {
                        return Err(corrupt("bad DHT class/id"));
                    }
                    let mut bits = [0u8; 16];
                    bits.copy_from_slice(s.slice(16)?);
                    let total: usize = bits.iter().map(|&b| b as usize).sum();
                    let values = s.slice(total)?.to_vec();
                    let table = HuffDecoder::from_spec(&bits, values);
                    if class == 0 {
                        dc_tables[id] = Some(table);
                    } else {
                        ac_tables[id] = Some(table);
                    }
                }
            }
            0xdb => {
                let len = p.u16()? as usize;
                let seg = p.slice(len.checked_sub(2).ok_or_else(|| corrupt("bad DQT length"))?)?;
                let mut s = Parser { data: seg, pos: 0 };
                while s.pos < seg.len() {
                    let pq_tq = s.u8()?;
                    let precision = pq_tq >> 4;
                    let id = (pq_tq & 0xf) as usize;
                    if id > 3 {
                        return Err(corrupt("bad DQT id"));
                    }
                    let mut table = [0u16; 64];
                    for k in 0..64 {
                        let v = if precision == 0 {
                            s.u8()? as u16
                        } else {
                            s.u16()?
                        };
                        table[ZIGZAG[k]] = v;
                    }
                    quant[id] = Some(table);
                }
            }
            0xdd => {
                let len = p.u16()? as usize;
                if len != 4 {
                    return Err(corrupt("bad DRI length"));
                }
                restart_interval = p.u16()? as usize;
            }
            0xda => {
                let (width, height, mut comps) = frame.take().ok_or_else(|| corrupt("SOS before SOF"))?;
                let len = p.u16()? as usize;
                let seg = p.slice(len.checked_sub(2).ok_or_else(|| corrupt("bad SOS length"))?)?;
                let mut s = Parser { data: seg, pos: 0 };
                let ns = s.u8()? as usize;
                if ns != comps.len() {
                    return Err(Error::UnsupportedFormat(
                        "non-interleaved JPEG scan".into(),
                    ));
                }
                for _ in 0..ns {
                    let cid = s.u8()?;
                    let tsel = s.u8()?;
                    let comp = comps
                        .iter_mut()
                        .find(|c| c.id == cid)
                        .ok_or_else(|| corrupt("SOS references unknown component"))?;
                    comp.dc_id = (tsel >> 4) as usize;
                    comp.ac_id = (tsel & 0xf) as usize;
                }
                // Ss, Se, AhAl: fixed in baseline; ignore values.
                let _ = s.slice(3)?;

                let scan_data = &data[p.pos..];
                decode_scan(
                    scan_data,
                    width,
                    height,
                    &mut comps,
                    &quant,
                    &dc_tables,
                    &ac_tables,
                    restart_interval,
                )?;
                return assemble_rgb(width, height, &comps);
            }
            // Application and comment segments carry no pixels.
            0xe0..=0xef | 0xfe => {
                let len = p.u16()? as usize;
                p.slice(len.checked_sub(2).ok_or_else(|| corrupt("bad segment length"))?)?;
            }
            other => {
                return Err(corrupt(format!("unexpected marker ff{other:02x}")));
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn decode_scan(
    scan: &[u8],
    width: usize,
    height: usize,
    comps: &mut [Component],
    quant: &[Option<[u16; 64]>; 4],
    dc_tables: &[Option<HuffDecoder>],
    ac_tables: &[Option<HuffDecoder>],
    restart_interval: usize,
) -> Result<()> {
    let h_max = comps.iter().map(|c| c.h).max().unwrap();
    let v_max = comps.iter().map(|c| c.v).max().unwrap();
    let mcus_x = width.div_ceil(8 * h_max);
    let mcus_y = height.div_ceil(8 * v_max);

    for c in comps.iter_mut() {
        c.plane_w = mcus_x * c.h * 8;
        c.plane_h = mcus_y * c.v * 8;
        c.plane = vec![0.0; c.plane_w * c.plane_h];
        c.dc_pred = 0;
        if quant[c.quant_id].is_none() {
            return Err(corrupt("missing quantization table"));
        }
    }

    let mut reader = BitReader::new(scan);
    let mut mcus_done = 0usize;
    for my in 0..mcus_y {
        for mx in 0..mcus_x {
            if restart_interval > 0
                && mcus_done > 0
                && mcus_done % restart_interval == 0
            {
                reader.consume_restart()?;
                for c in comps.iter_mut() {
                    c.dc_pred = 0;
                }
            }
            for ci in 0..comps.len() {
                let (dc_id, ac_id, qid) =
                    (comps[ci].dc_id, comps[ci].ac_id, comps[ci].quant_id);
                let dc = dc_tables[dc_id]
                    .as_ref()
                    .ok_or_else(|| corrupt("missing DC huffman table"))?;
                let ac = ac_tables[ac_id]
                    .as_ref()
                    .ok_or_else(|| corrupt("missing AC huffman table"))?;
                let qt = quant[qid].as_ref().unwrap();
                for by in 0..comps[ci].v {
                    for bx in 0..comps[ci].h {
                        let block =
                            decode_block(&mut reader, dc, ac, qt, &mut comps[ci].dc_pred)?;
                        let c = &mut comps[ci];
                        let ox = (mx * c.h + bx) * 8;
                        let oy = (my * c.v + by) * 8;
                        for y in 0..8 {
                            for x in 0..8 {
                                c.plane[(oy + y) * c.plane_w + ox + x] =
                                    block[y * 8 + x];
                            }
                        }
                    }
                }
            }
            mcus_done += 1;
        }
    }
    Ok(())
}

fn decode_block(
    reader: &mut BitReader,
    dc: &HuffDecoder,
    ac: &HuffDecoder,
    qt: &[u16; 64],
    dc_pred: &mut i32,
) -> Result<[f64; 64]> {
    let mut coefs = [0.0f64; 64];

    let s = reader.decode_symbol(dc)? as u32;
    if s > 11 {
        return Err(corrupt("DC category out of range"));
    }
    let diff = extend(reader.read_bits(s)?, s);
    *dc_pred += diff;
    coefs[0] = *dc_pred as f64 * qt[0] as f64;

    let mut k = 1usize;
    while k < 64 {
        let rs = reader.decode_symbol(ac)?;
        let run = (rs >> 4) as usize;
        let size = (rs & 0xf) as u32;
        if size == 0 {
            if run == 15 {
                k += 16;
                continue;
            }
            break; // EOB
        }
        k += run;
        if k > 63 {
            return Err(corrupt("AC index overflow"));
        }
        let v = extend(reader.read_bits(size)?, size);
        let nat = ZIGZAG[k];
        coefs[nat] = v as f64 * qt[nat] as f64;
        k += 1;
    }

    let px = dct::inverse(&coefs);
    let mut out = [0.0f64; 64];
    for (o, &v) in out.iter_mut().zip(px.iter()) {
        *o = v + 128.0;
    }
    Ok(out)
}

fn assemble_rgb(width: usize, height: usize, comps: &[Component]) -> Result<ImageBuffer> {
    let h_max = comps.iter().map(|c| c.h).max().unwrap();
    let v_max = comps.iter().map(|c| c.v).max().unwrap();

    // Upsample each component to full resolution by replication.
    let sample = |c: &Component, x: usize, y: usize| -> f64 {
        let sx = (x * c.h / h_max).min(c.plane_w - 1);
        let sy = (y * c.v / v_max).min(c.plane_h - 1);
        c.plane[sy * c.plane_w + sx]
    };

    let mut data = vec![0u8; width * height * 3];
    if comps.len() == 1 {
        for y in 0..height {
            for x in 0..width {
                let g = clamp_u8(sample(&comps[0], x, y));
                let i = (y * width + x) * 3;
                data[i] = g;
                data[i + 1] = g;
                data[i + 2] = g;
            }
        }
    } else {
        for y in 0..height {
            for x in 0..width {
                let yy = sample(&comps[0], x, y);
                let cb = sample(&comps[1], x, y) - 128.0;
                let cr = sample(&comps[2], x, y) - 128.0;
                let i = (y * width + x) * 3;
                data[i] = clamp_u8(yy + 1.402 * cr);
                data[i + 1] = clamp_u8(yy - 0.344_136_286 * cb - 0.714_136_286 * cr);
                data[i + 2] = clamp_u8(yy + 1.772 * cb);
            }
        }
    }
    ImageBuffer::from_raw(width, height, data)
}
