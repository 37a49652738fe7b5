// SPDX-License-Identifier: Apache-2.0

//! Smoothing filters: separable Gaussian blur, bilateral filter, and
//! non-local means.

use crate::image::{clamp_u8, ImageBuffer};

/// Reflected (symmetric) border index: `d c b a | a b c d | d c b a`.
#[inline]
fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

/// Sampled Gaussian kernel with radius ceil(3 sigma), normalized.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    for v in k.iter_mut() {
        *v /= sum;
    }
    k
}

/// Separable Gaussian blur of one f64 plane with reflected borders.
pub fn gaussian_blur_plane(plane: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as i64;
    let mut mid = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let sx = reflect(x as i64 + k as i64 - radius, w);
                acc += kv * plane[y * w + sx];
            }
            mid[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let sy = reflect(y as i64 + k as i64 - radius, h);
                acc += kv * mid[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Gaussian blur of an RGB buffer, rounding once at the end.
pub fn gaussian_blur(img: &ImageBuffer, sigma: f64) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let mut out = ImageBuffer::zeroed(w, h);
    for c in 0..3 {
        let plane = img.channel_f64(c);
        let blurred = gaussian_blur_plane(&plane, w, h, sigma);
        for (i, &v) in blurred.iter().enumerate() {
            out.data_mut()[i * 3 + c] = clamp_u8(v);
        }
    }
    out
}

/// Bilateral filter: 7x7 window, Gaussian spatial weight, Gaussian range
/// weight on the Euclidean RGB distance.
pub fn bilateral(img: &ImageBuffer, sigma_color: f64, sigma_spatial: f64) -> ImageBuffer {
    const RADIUS: i64 = 3;
    let (w, h) = (img.width(), img.height());
    let inv_2ss = 1.0 / (2.0 * sigma_spatial * sigma_spatial);
    let inv_2sc = 1.0 / (2.0 * sigma_color * sigma_color);

    let mut spatial = [[0.0f64; 7]; 7];
    for (dy, row) in spatial.iter_mut().enumerate() {
        for (dx, v) in row.iter_mut().enumerate() {
            let ddx = dx as f64 - 3.0;
            let ddy = dy as f64 - 3.0;
            *v = (-(ddx * ddx + ddy * ddy) * inv_2ss).exp();
        }
    }

    let mut out = ImageBuffer::zeroed(w, h);
    for y in 0..h {
        for x in 0..w {
            let center = img.pixel(x, y);
            let mut num = [0.0f64; 3];
            let mut den = 0.0f64;
            for dy in -RADIUS..=RADIUS {
                for dx in -RADIUS..=RADIUS {
                    let sx = reflect(x as i64 + dx, w);
                    let sy = reflect(y as i64 + dy, h);
                    let p = img.pixel(sx, sy);
                    let d2 = (0..3)
                        .map(|c| (p[c] as f64 - center[c] as f64).powi(2))
                        .sum::<f64>();
                    let range = -d2 * inv_2sc;
                    let wgt = if range < -13.0 {
                        0.0
                    } else {
                        spatial[(dy + 3) as usize][(dx + 3) as usize] * range.exp()
                    };
                    den += wgt;
                    for c in 0..3 {
                        num[c] += wgt * p[c] as f64;
                    }
                }
            }
            for c in 0..3 {
                out.set(x, y, c, clamp_u8(num[c] / den));
            }
        }
    }
    out
}

/// Non-local means: 7x7 patches, 21x21 search window, weights
/// exp(-d/h^2) on the per-sample mean squared patch distance.
///
/// Uses the offset decomposition: for each displacement t the squared
/// difference plane is box-filtered once, and the symmetric displacement
/// -t reuses the same plane.
pub fn non_local_means(img: &ImageBuffer, h_strength: f64) -> ImageBuffer {
    const SEARCH_RADIUS: i64 = 10;
    const PATCH_RADIUS: i64 = 3;
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let inv_h2 = 1.0 / (h_strength * h_strength);

    let planes: Vec<Vec<f64>> = (0..3).map(|c| img.channel_f64(c)).collect();

    let mut num = vec![[0.0f64; 3]; n];
    let mut den = vec![0.0f64; n];

    // Center contribution (t = 0): weight exactly 1.
    for i in 0..n {
        den[i] = 1.0;
        for c in 0..3 {
            num[i][c] = planes[c][i];
        }
    }

    let read = |p: &[f64], x: i64, y: i64| -> f64 {
        p[reflect(y, h) * w + reflect(x, w)]
    };

    // Lexicographically positive displacements; -t is folded in.
    let mut displacements = Vec::new();
    for ty in 0..=SEARCH_RADIUS {
        let x0 = if ty == 0 { 1 } else { -SEARCH_RADIUS };
        for tx in x0..=SEARCH_RADIUS {
            displacements.push((tx, ty));
        }
    }

    let mut sq = vec![0.0f64; n];
    let mut boxed = vec![0.0f64; n];
    let mut tmp = vec![0.0f64; n];
    for (tx, ty) in displacements {
        // Per-pixel squared difference to the displaced image.
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let i = y as usize * w + x as usize;
                let mut d2 = 0.0;
                for p in planes.iter() {
                    let d = p[i] - read(p, x + tx, y + ty);
                    d2 += d * d;
                }
                sq[i] = d2;
            }
        }
        // Patch mean via a separable box filter (reflected borders).
        box_filter(&sq, w, h, PATCH_RADIUS, &mut tmp, &mut boxed);
        let norm = 1.0 / (((2 * PATCH_RADIUS + 1).pow(2) * 3) as f64);

        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let i = y as usize * w + x as usize;
                let d = boxed[i] * norm * inv_h2;
                if d > 13.0 {
                    continue;
                }
                let wgt = (-d).exp();
                // Forward: pixel i looks at i + t.
                den[i] += wgt;
                for (c, p) in planes.iter().enumerate() {
                    num[i][c] += wgt * read(p, x + tx, y + ty);
                }
                // Mirror: pixel i + t looks back at i with the same weight.
                let jx = x + tx;
                let jy = y + ty;
                if jx >= 0 && jx < w as i64 && jy >= 0 && jy < h as i64 {
                    let j = jy as usize * w + jx as usize;
                    den[j] += wgt;
                    for (c, p) in planes.iter().enumerate() {
                        num[j][c] += wgt * p[i];
                    }
                }
            }
        }
    }

    let mut out = ImageBuffer::zeroed(w, h);
    for i in 0..n {
        for c in 0..3 {
            out.data_mut()[i * 3 + c] = clamp_u8(num[i][c] / den[i]);
        }
    }
    out
}

/// Separable box sum with reflected borders; `out` receives the sums.
fn box_filter(
    plane: &[f64],
    w: usize,
    h: usize,
    radius: i64,
    tmp: &mut [f64],
    out: &mut [f64],
) {
    for y in 0..h {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for d in -radius..=radius {
                acc += plane[y * w + reflect(x + d, w)];
            }
            tmp[y * w + x as usize] = acc;
        }
    }
    for y in 0..h as i64 {
        for x in 0..w {
            let mut acc = 0.0;
            for d in -radius..=radius {
                acc += tmp[reflect(y + d, h) * w + x];
            }
            out[y as usize * w + x] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_kernel_is_normalized_and_symmetric() {
        let k = gaussian_kernel(1.35);
        assert_eq!(k.len(), 2 * 5 + 1); // radius = ceil(4.05) = 5
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..k.len() / 2 {
            assert!((k[i] - k[k.len() - 1 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn blur_preserves_flat_images() {
        let img = ImageBuffer::filled(32, 32, 77);
        assert_eq!(gaussian_blur(&img, 1.0), img);
    }

    #[test]
    fn bilateral_preserves_flat_images() {
        let img = ImageBuffer::filled(16, 16, 50);
        assert_eq!(bilateral(&img, 60.0, 3.0), img);
    }

    #[test]
    fn nlm_preserves_flat_images() {
        let img = ImageBuffer::filled(24, 24, 130);
        assert_eq!(non_local_means(&img, 10.0), img);
    }

    #[test]
    fn nlm_reduces_noise_variance() {
        let clean = ImageBuffer::filled(48, 48, 128);
        let noisy = {
            let mut img = clean.clone();
            let mut rng = crate::seeds::rng_for(3, "nlm-test", 0);
            for b in img.data_mut() {
                let d: i16 = rand::Rng::gen_range(&mut rng, -8..=8);
                *b = (*b as i16 + d).clamp(0, 255) as u8;
            }
            img
        };
        let denoised = non_local_means(&noisy, 10.0);
        let var = |img: &ImageBuffer| {
            let mean = img.data().iter().map(|&b| b as f64).sum::<f64>()
                / img.data().len() as f64;
            img.data()
                .iter()
                .map(|&b| (b as f64 - mean).powi(2))
                .sum::<f64>()
                / img.data().len() as f64
        };
        assert!(var(&denoised) < var(&noisy) * 0.5);
    }
}
