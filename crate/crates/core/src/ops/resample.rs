// SPDX-License-Identifier: Apache-2.0

//! Separable resampling (bilinear and Lanczos-3) and bilinear rotation.
//!
//! Sampling uses half-pixel centers; on downscale the kernel support is
//! scaled with the ratio so the filter acts as a proper anti-aliasing
//! average rather than point sampling.

use crate::image::{clamp_u8, ImageBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Bilinear,
    Lanczos3,
}

impl Kernel {
    fn support(self) -> f64 {
        match self {
            Kernel::Bilinear => 1.0,
            Kernel::Lanczos3 => 3.0,
        }
    }

    fn eval(self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            Kernel::Bilinear => {
                if t < 1.0 {
                    1.0 - t
                } else {
                    0.0
                }
            }
            Kernel::Lanczos3 => {
                if t < 1e-12 {
                    1.0
                } else if t < 3.0 {
                    let a = std::f64::consts::PI * t;
                    let b = a / 3.0;
                    3.0 * (a.sin() * b.sin()) / (a * a)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Precomputed contribution window for one output coordinate.
struct Contrib {
    start: usize,
    weights: Vec<f64>,
}

fn build_contribs(src: usize, dst: usize, kernel: Kernel) -> Vec<Contrib> {
    let scale = src as f64 / dst as f64;
    let fscale = scale.max(1.0);
    let support = kernel.support() * fscale;
    (0..dst)
        .map(|d| {
            let center = (d as f64 + 0.5) * scale - 0.5;
            let lo = ((center - support).ceil() as i64).max(0) as usize;
            let hi = ((center + support).floor() as i64).min(src as i64 - 1) as usize;
            let mut weights: Vec<f64> = (lo..=hi)
                .map(|s| kernel.eval((s as f64 - center) / fscale))
                .collect();
            let sum: f64 = weights.iter().sum();
            if sum != 0.0 {
                for w in weights.iter_mut() {
                    *w /= sum;
                }
            }
            Contrib { start: lo, weights }
        })
        .collect()
}

/// Resample one f64 plane, horizontal pass then vertical pass.
pub fn resize_plane(
    plane: &[f64],
    sw: usize,
    sh: usize,
    dw: usize,
    dh: usize,
    kernel: Kernel,
) -> Vec<f64> {
    let hx = build_contribs(sw, dw, kernel);
    let mut mid = vec![0.0f64; dw * sh];
    for y in 0..sh {
        let row = &plane[y * sw..(y + 1) * sw];
        for (x, c) in hx.iter().enumerate() {
            let mut acc = 0.0;
            for (k, w) in c.weights.iter().enumerate() {
                acc += w * row[c.start + k];
            }
            mid[y * dw + x] = acc;
        }
    }
    let vy = build_contribs(sh, dh, kernel);
    let mut out = vec![0.0f64; dw * dh];
    for (y, c) in vy.iter().enumerate() {
        for x in 0..dw {
            let mut acc = 0.0;
            for (k, w) in c.weights.iter().enumerate() {
                acc += w * mid[(c.start + k) * dw + x];
            }
            out[y * dw + x] = acc;
        }
    }
    out
}

/// Resample an RGB buffer.
pub fn resize(img: &ImageBuffer, dw: usize, dh: usize, kernel: Kernel) -> ImageBuffer {
    let (sw, sh) = (img.width(), img.height());
    let mut out = ImageBuffer::zeroed(dw, dh);
    for c in 0..3 {
        let plane = img.channel_f64(c);
        let resized = resize_plane(&plane, sw, sh, dw, dh, kernel);
        for (i, &v) in resized.iter().enumerate() {
            out.data_mut()[i * 3 + c] = clamp_u8(v);
        }
    }
    out
}

/// Rotate about the image center with bilinear sampling (clamped edges).
pub fn rotate_bilinear(img: &ImageBuffer, degrees: f64) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let theta = degrees.to_radians();
    let (sin, cos) = theta.sin_cos();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;

    let planes: Vec<Vec<f64>> = (0..3).map(|c| img.channel_f64(c)).collect();
    let sample = |p: &[f64], x: f64, y: f64| -> f64 {
        let xc = x.clamp(0.0, w as f64 - 1.0);
        let yc = y.clamp(0.0, h as f64 - 1.0);
        let x0 = xc.floor() as usize;
        let y0 = yc.floor() as usize;
        let x1 = (x0 + 1).min(w - 1);
        let y1 = (y0 + 1).min(h - 1);
        let tx = xc - x0 as f64;
        let ty = yc - y0 as f64;
        let top = p[y0 * w + x0] * (1.0 - tx) + p[y0 * w + x1] * tx;
        let bot = p[y1 * w + x0] * (1.0 - tx) + p[y1 * w + x1] * tx;
        top * (1.0 - ty) + bot * ty
    };

    let mut out = ImageBuffer::zeroed(w, h);
    for y in 0..h {
        for x in 0..w {
            // Inverse map: destination -> source.
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let sx = cos * dx + sin * dy + cx;
            let sy = -sin * dx + cos * dy + cy;
            for c in 0..3 {
                out.set(x, y, c, clamp_u8(sample(&planes[c], sx, sy)));
            }
        }
    }
    out
}

/// Center crop to a square of the given side.
pub fn center_crop(img: &ImageBuffer, side: usize) -> ImageBuffer {
    let x0 = (img.width() - side) / 2;
    let y0 = (img.height() - side) / 2;
    let mut out = ImageBuffer::zeroed(side, side);
    for y in 0..side {
        for x in 0..side {
            for c in 0..3 {
                out.set(x, y, c, img.get(x0 + x, y0 + y, c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_resize_is_identity() {
        let img = crate::synth::textured(64, 64, 8);
        assert_eq!(resize(&img, 64, 64, Kernel::Bilinear), img);
        assert_eq!(resize(&img, 64, 64, Kernel::Lanczos3), img);
    }

    #[test]
    fn flat_image_survives_resampling_exactly() {
        let img = ImageBuffer::filled(64, 64, 99);
        for kernel in [Kernel::Bilinear, Kernel::Lanczos3] {
            let down = resize(&img, 30, 30, kernel);
            assert!(down.data().iter().all(|&b| b == 99));
            let up = resize(&down, 64, 64, kernel);
            assert!(up.data().iter().all(|&b| b == 99));
        }
    }

    #[test]
    fn rotation_by_zero_is_identity() {
        let img = crate::synth::textured(32, 32, 9);
        assert_eq!(rotate_bilinear(&img, 0.0), img);
    }

    #[test]
    fn center_crop_extracts_expected_window() {
        let mut img = ImageBuffer::zeroed(8, 8);
        img.set(3, 3, 0, 200);
        let crop = center_crop(&img, 4);
        // (3,3) in the source is (1,1) after removing a 2-pixel margin.
        assert_eq!(crop.get(1, 1, 0), 200);
    }
}
