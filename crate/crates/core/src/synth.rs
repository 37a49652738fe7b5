// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic images for fixtures and desk-scale experiments.
//!
//! `textured` is the workhorse: a natural-image proxy with multi-scale
//! structure (fractal value noise), smooth color fields, a few soft
//! shapes, and a little per-pixel grain so codecs and denoisers have
//! realistic material to work with.

use rand::Rng;

use crate::image::{clamp_u8, ImageBuffer};
use crate::seeds::rng_for;

/// Bilinearly interpolated random grid with the given spacing.
fn value_noise(w: usize, h: usize, spacing: usize, rng: &mut impl Rng) -> Vec<f64> {
    let gw = w / spacing + 2;
    let gh = h / spacing + 2;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let fy = y as f64 / spacing as f64;
        let y0 = fy as usize;
        let ty = fy - y0 as f64;
        for x in 0..w {
            let fx = x as f64 / spacing as f64;
            let x0 = fx as usize;
            let tx = fx - x0 as f64;
            let g = |gx: usize, gy: usize| grid[gy * gw + gx];
            let top = g(x0, y0) * (1.0 - tx) + g(x0 + 1, y0) * tx;
            let bot = g(x0, y0 + 1) * (1.0 - tx) + g(x0 + 1, y0 + 1) * tx;
            out[y * w + x] = top * (1.0 - ty) + bot * ty;
        }
    }
    out
}

/// Sum of value-noise octaves with geometric gain, roughly unit range.
fn fractal(
    w: usize,
    h: usize,
    seed: u64,
    stream: u64,
    scales: &[usize],
    gain: f64,
) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    let mut amp = 1.0;
    let mut total = 0.0;
    for (k, &s) in scales.iter().enumerate() {
        let mut rng = rng_for(seed, "synth-octave", stream * 97 + k as u64);
        let layer = value_noise(w, h, s, &mut rng);
        for (o, v) in out.iter_mut().zip(layer.iter()) {
            *o += amp * v;
        }
        total += amp;
        amp *= gain;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    out
}

/// Natural-image proxy: multi-scale luminance, smooth chroma, soft
/// shapes, grainy textured zones, and genuinely flat zones (a detail
/// mask decides which), so codecs see both busy and losslessly-flat
/// content. Deterministic in (w, h, seed).
pub fn textured(w: usize, h: usize, seed: u64) -> ImageBuffer {
    let luma = fractal(w, h, seed, 0, &[256, 128, 64, 32, 16, 8, 4], 0.72);
    let c1 = fractal(w, h, seed, 1, &[256, 128, 64], 0.6);
    let c2 = fractal(w, h, seed, 2, &[256, 128, 64], 0.6);
    // Mid-frequency field deciding how much fine detail survives locally.
    let detail = fractal(w, h, seed, 3, &[128, 64, 32], 0.65);

    let mut rng = rng_for(seed, "synth-shapes", 0);
    let n_shapes = rng.gen_range(3..7usize);
    let shapes: Vec<(f64, f64, f64, f64, [f64; 3])> = (0..n_shapes)
        .map(|_| {
            let cx = rng.gen_range(0.0..w as f64);
            let cy = rng.gen_range(0.0..h as f64);
            let rx = rng.gen_range(0.08..0.35) * w as f64;
            let ry = rng.gen_range(0.08..0.35) * h as f64;
            let delta = [
                rng.gen_range(-45.0..45.0),
                rng.gen_range(-45.0..45.0),
                rng.gen_range(-45.0..45.0),
            ];
            (cx, cy, rx, ry, delta)
        })
        .collect();

    let (gx, gy) = {
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        (a.cos(), a.sin())
    };

    let mut grain = rng_for(seed, "synth-grain", 0);
    let mut img = ImageBuffer::zeroed(w, h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            // 0 in flat zones, ramping to 1 in fully textured ones.
            let mask = ((detail[i] + 0.12) / 0.4).clamp(0.0, 1.0);
            let grad = (gx * (x as f64 / w as f64 - 0.5)
                + gy * (y as f64 / h as f64 - 0.5))
                * 36.0;
            let base = 128.0 + 56.0 * luma[i] + grad;
            let mut px = [
                base + 26.0 * c1[i],
                base - 12.0 * c1[i] + 20.0 * c2[i],
                base - 26.0 * c2[i],
            ];
            for &(cx, cy, rx, ry, delta) in &shapes {
                let d = ((x as f64 - cx) / rx).powi(2) + ((y as f64 - cy) / ry).powi(2);
                // Soft edge over the last 15% of the radius.
                let t = ((1.0 - d) / 0.15).clamp(0.0, 1.0);
                if t > 0.0 {
                    for (p, dl) in px.iter_mut().zip(delta.iter()) {
                        *p += t * dl;
                    }
                }
            }
            let j = i * 3;
            if mask == 0.0 {
                // Flat zone: one gray level per 32-pixel cell (aligned to
                // whole 8x8 codec blocks), sampled from the coarse field
                // at the cell corner so it is constant within the cell.
                let (cx0, cy0) = (x / 32 * 32, y / 32 * 32);
                let corner = cy0 * w + cx0;
                let cell = ((y / 32) * (w / 32 + 1) + x / 32) as f64;
                let v = clamp_u8(
                    128.0 + 56.0 * luma[corner] + 11.0 * (cell * 0.737).sin(),
                );
                img.data_mut()[j] = v;
                img.data_mut()[j + 1] = v;
                img.data_mut()[j + 2] = v;
            } else {
                let g: f64 = grain.gen_range(-16.0..16.0);
                for p in px.iter_mut() {
                    *p += mask * (g + grain.gen_range(-8.0..8.0));
                }
                img.data_mut()[j] = clamp_u8(px[0]);
                img.data_mut()[j + 1] = clamp_u8(px[1]);
                img.data_mut()[j + 2] = clamp_u8(px[2]);
            }
        }
    }
    img
}

/// Constant gray image.
pub fn flat(w: usize, h: usize, value: u8) -> ImageBuffer {
    ImageBuffer::filled(w, h, value)
}

/// Uniform background with a single bright center pixel.
pub fn impulse(w: usize, h: usize, background: u8, peak: u8) -> ImageBuffer {
    let mut img = ImageBuffer::filled(w, h, background);
    for c in 0..3 {
        img.set(w / 2, h / 2, c, peak);
    }
    img
}

/// Gray horizontal cosine at `freq` cycles/pixel with the given amplitude.
pub fn sinusoid(w: usize, h: usize, freq: f64, amplitude: f64) -> ImageBuffer {
    let mut img = ImageBuffer::zeroed(w, h);
    for y in 0..h {
        for x in 0..w {
            let v = clamp_u8(127.5 + amplitude * (std::f64::consts::TAU * freq * x as f64).cos());
            for c in 0..3 {
                img.set(x, y, c, v);
            }
        }
    }
    img
}

/// Independent uniform noise in every sample.
pub fn white_noise(w: usize, h: usize, seed: u64) -> ImageBuffer {
    let mut rng = rng_for(seed, "synth-white", 0);
    let mut img = ImageBuffer::zeroed(w, h);
    for b in img.data_mut() {
        *b = rng.gen_range(0..=255u8);
    }
    img
}
