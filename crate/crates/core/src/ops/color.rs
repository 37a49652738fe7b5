// SPDX-License-Identifier: Apache-2.0

//! Color-space conversions used by the operators and probes.

use crate::image::{clamp_u8, ImageBuffer};

/// ITU-R BT.601 luma, replicated to all three channels.
pub fn grayscale_bt601(img: &ImageBuffer) -> ImageBuffer {
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        let y = clamp_u8(
            0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64,
        );
        px[0] = y;
        px[1] = y;
        px[2] = y;
    }
    out
}

/// Full-range YCbCr planes as f64.
pub fn rgb_to_ycbcr(img: &ImageBuffer) -> [Vec<f64>; 3] {
    let n = img.width() * img.height();
    let mut y = vec![0.0; n];
    let mut cb = vec![0.0; n];
    let mut cr = vec![0.0; n];
    for (i, px) in img.data().chunks_exact(3).enumerate() {
        let (r, g, b) = (px[0] as f64, px[1] as f64, px[2] as f64);
        y[i] = 0.299 * r + 0.587 * g + 0.114 * b;
        cb[i] = 128.0 - 0.168_735_892 * r - 0.331_264_108 * g + 0.5 * b;
        cr[i] = 128.0 + 0.5 * r - 0.418_687_589 * g - 0.081_312_411 * b;
    }
    [y, cb, cr]
}

/// Inverse of [`rgb_to_ycbcr`], rounding into 8-bit RGB.
pub fn ycbcr_to_rgb(
    planes: &[Vec<f64>; 3],
    width: usize,
    height: usize,
) -> ImageBuffer {
    let mut img = ImageBuffer::zeroed(width, height);
    for i in 0..width * height {
        let y = planes[0][i];
        let cb = planes[1][i] - 128.0;
        let cr = planes[2][i] - 128.0;
        let j = i * 3;
        img.data_mut()[j] = clamp_u8(y + 1.402 * cr);
        img.data_mut()[j + 1] = clamp_u8(y - 0.344_136_286 * cb - 0.714_136_286 * cr);
        img.data_mut()[j + 2] = clamp_u8(y + 1.772 * cb);
    }
    img
}

/// 8-bit HSV with hue in [0, 180): one hue unit is two degrees.
pub fn rgb_to_hsv8(r: u8, g: u8, b: u8) -> (u8, u8, u8) {
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let v = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let d = v - min;
    let s = if v == 0.0 { 0.0 } else { 255.0 * d / v };
    let h_deg = if d == 0.0 {
        0.0
    } else if v == rf {
        60.0 * ((gf - bf) / d).rem_euclid(6.0)
    } else if v == gf {
        60.0 * ((bf - rf) / d + 2.0)
    } else {
        60.0 * ((rf - gf) / d + 4.0)
    };
    let h8 = (h_deg / 2.0).round() as i32 % 180;
    (h8 as u8, clamp_u8(s), clamp_u8(v))
}

/// Inverse of [`rgb_to_hsv8`].
pub fn hsv8_to_rgb(h8: u8, s: u8, v: u8) -> (u8, u8, u8) {
    let h_deg = h8 as f64 * 2.0;
    let sf = s as f64 / 255.0;
    let vf = v as f64;
    let c = vf * sf;
    let hp = h_deg / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = vf - c;
    (clamp_u8(r1 + m), clamp_u8(g1 + m), clamp_u8(b1 + m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grayscale_is_idempotent() {
        let img = crate::synth::textured(32, 32, 2);
        let g1 = grayscale_bt601(&img);
        let g2 = grayscale_bt601(&g1);
        assert_eq!(g1, g2);
    }

    #[test]
    fn ycbcr_roundtrip_is_near_exact() {
        let img = crate::synth::textured(32, 32, 3);
        let planes = rgb_to_ycbcr(&img);
        let back = ycbcr_to_rgb(&planes, 32, 32);
        for (a, b) in back.data().iter().zip(img.data()) {
            assert!((*a as i16 - *b as i16).abs() <= 1);
        }
    }

    #[test]
    fn hsv_primaries() {
        assert_eq!(rgb_to_hsv8(255, 0, 0), (0, 255, 255));
        assert_eq!(rgb_to_hsv8(0, 255, 0), (60, 255, 255));
        assert_eq!(rgb_to_hsv8(0, 0, 255), (120, 255, 255));
        assert_eq!(hsv8_to_rgb(60, 255, 255), (0, 255, 0));
    }

    #[test]
    fn hsv_roundtrip_is_close() {
        let img = crate::synth::textured(24, 24, 4);
        for px in img.data().chunks_exact(3) {
            let (h, s, v) = rgb_to_hsv8(px[0], px[1], px[2]);
            let (r, g, b) = hsv8_to_rgb(h, s, v);
            assert!((r as i16 - px[0] as i16).abs() <= 6);
            assert!((g as i16 - px[1] as i16).abs() <= 6);
            assert!((b as i16 - px[2] as i16).abs() <= 6);
        }
    }
}
