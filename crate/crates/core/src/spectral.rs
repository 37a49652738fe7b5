// SPDX-License-Identifier: Apache-2.0

//! Residual power-spectral-density fingerprints.
//!
//! Pipeline: paired residual -> 2D Hann window -> 2D FFT (DC-centered)
//! -> squared magnitude, mean over samples, scaled by (HW)^-2 ->
//! azimuthal average into integer-pixel-radius bins -> log-ratio against
//! a content-matched control built from unpaired clean differences.

use rand::seq::SliceRandom;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::image::ImageBuffer;
use crate::seeds::rng_for;
use crate::{Error, Result};

/// Standard field edge length.
pub const FIELD_SIZE: usize = 512;

/// Radial bins for a 512x512 field: radii 0..=256 spanning [0, 0.5]
/// cycles/pixel.
pub const PROFILE_BINS: usize = FIELD_SIZE / 2 + 1;

/// Grayscale field of an image: unweighted RGB mean, normalized to [0, 1].
pub fn normalized_gray_field(img: &ImageBuffer) -> Vec<f64> {
    img.gray_mean_f64().iter().map(|&v| v / 255.0).collect()
}

/// Paired residual: attacked minus clean, in [0, 1] units, grayscale by
/// channel averaging.
pub fn residual(clean: &ImageBuffer, attacked: &ImageBuffer) -> Result<Vec<f64>> {
    if !clean.same_geometry(attacked) {
        return Err(Error::GeometryMismatch(format!(
            "{}x{} vs {}x{}",
            clean.width(),
            clean.height(),
            attacked.width(),
            attacked.height()
        )));
    }
    Ok(clean
        .data()
        .chunks_exact(3)
        .zip(attacked.data().chunks_exact(3))
        .map(|(c, a)| {
            let d0 = a[0] as f64 - c[0] as f64;
            let d1 = a[1] as f64 - c[1] as f64;
            let d2 = a[2] as f64 - c[2] as f64;
            (d0 + d1 + d2) / (3.0 * 255.0)
        })
        .collect())
}

/// Mean 2D PSD, DC-centered.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Psd2D {
    pub size: usize,
    /// Row-major size x size grid; cell (i, j) holds frequency
    /// (i - size/2, j - size/2) in pixel units.
    pub values: Vec<f64>,
    pub n_samples: usize,
}

/// Azimuthally averaged PSD.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub size: usize,
    /// Mean PSD per integer pixel radius, radii 0..=size/2.
    pub bins: Vec<f64>,
    pub n_samples: usize,
}

impl SpectralProfile {
    /// Frequency of bin k in cycles/pixel.
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 / self.size as f64
    }
}

/// Symmetric 2D Hann window value at index k of n.
fn hann(k: usize, n: usize) -> f64 {
    0.5 * (1.0 - (std::f64::consts::TAU * k as f64 / (n - 1) as f64).cos())
}

/// Streaming PSD accumulator; merging is associative so a fixed reduction
/// tree gives thread-count-independent results.
#[derive(Debug, Clone)]
pub struct PsdAccumulator {
    size: usize,
    windowed: bool,
    sum: Vec<f64>,
    n_samples: usize,
}

impl PsdAccumulator {
    /// `windowed = false` exists for the Parseval check; analyses use the
    /// Hann window.
    pub fn new(size: usize, windowed: bool) -> Self {
        assert!(size % 2 == 0, "field size must be even");
        Self { size, windowed, sum: vec![0.0; size * size], n_samples: 0 }
    }

    /// Add one field (length size*size).
    pub fn add(&mut self, field: &[f64]) {
        let n = self.size;
        assert_eq!(field.len(), n * n, "field length");
        let mut buf: Vec<Complex<f64>> = if self.windowed {
            let w: Vec<f64> = (0..n).map(|k| hann(k, n)).collect();
            field
                .iter()
                .enumerate()
                .map(|(i, &v)| Complex::new(v * w[i / n] * w[i % n], 0.0))
                .collect()
        } else {
            field.iter().map(|&v| Complex::new(v, 0.0)).collect()
        };
        fft2d_in_place(&mut buf, n);
        let scale = 1.0 / ((n * n) as f64 * (n * n) as f64);
        let half = n / 2;
        for i in 0..n {
            for j in 0..n {
                // fftshift while accumulating.
                let si = (i + half) % n;
                let sj = (j + half) % n;
                self.sum[si * n + sj] += buf[i * n + j].norm_sqr() * scale;
            }
        }
        self.n_samples += 1;
    }

    /// Combine two accumulators.
    pub fn merge(mut self, other: PsdAccumulator) -> Self {
        assert_eq!(self.size, other.size);
        assert_eq!(self.windowed, other.windowed);
        for (a, b) in self.sum.iter_mut().zip(other.sum.iter()) {
            *a += b;
        }
        self.n_samples += other.n_samples;
        self
    }

    pub fn finalize(self) -> Psd2D {
        let n = self.n_samples.max(1) as f64;
        Psd2D {
            size: self.size,
            values: self.sum.iter().map(|&s| s / n).collect(),
            n_samples: self.n_samples,
        }
    }
}

/// Forward 2D FFT, rows then columns, in place.
fn fft2d_in_place(buf: &mut [Complex<f64>], n: usize) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    // Transpose, transform columns as rows, transpose back.
    transpose(buf, n);
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(buf, n);
}

fn transpose(buf: &mut [Complex<f64>], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Mean windowed PSD over a stream of fields.
pub fn psd<'a>(fields: impl IntoIterator<Item = &'a [f64]>, size: usize) -> Psd2D {
    let mut acc = PsdAccumulator::new(size, true);
    for f in fields {
        acc.add(f);
    }
    acc.finalize()
}

/// Mean windowed PSD computed in parallel over a fixed reduction tree, so
/// the result does not depend on worker count or scheduling.
pub fn psd_parallel<F>(count: usize, size: usize, windowed: bool, field_fn: F) -> Psd2D
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    fn go<F>(lo: usize, hi: usize, size: usize, windowed: bool, field_fn: &F) -> PsdAccumulator
    where
        F: Fn(usize) -> Vec<f64> + Sync,
    {
        const LEAF: usize = 8;
        if hi - lo <= LEAF {
            let mut acc = PsdAccumulator::new(size, windowed);
            for i in lo..hi {
                acc.add(&field_fn(i));
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            let (a, b) = rayon::join(
                || go(lo, mid, size, windowed, field_fn),
                || go(mid, hi, size, windowed, field_fn),
            );
            a.merge(b)
        }
    }
    go(0, count, size, windowed, &field_fn).finalize()
}

/// Integer pixel radius of a DC-centered cell, clamped to the Nyquist
/// bin so the bins partition every cell exactly once.
#[inline]
fn cell_radius(i: usize, j: usize, size: usize) -> usize {
    let half = (size / 2) as f64;
    let u = i as f64 - half;
    let v = j as f64 - half;
    let r = (u * u + v * v).sqrt().round() as usize;
    r.min(size / 2)
}

/// Number of cells per radial bin.
pub fn radial_cell_counts(size: usize) -> Vec<usize> {
    let mut counts = vec![0usize; size / 2 + 1];
    for i in 0..size {
        for j in 0..size {
            counts[cell_radius(i, j, size)] += 1;
        }
    }
    counts
}

/// Collapse a 2D PSD to its azimuthal average.
pub fn radial_profile(psd: &Psd2D) -> SpectralProfile {
    let n = psd.size;
    let nbins = n / 2 + 1;
    let mut sums = vec![0.0f64; nbins];
    let mut counts = vec![0usize; nbins];
    for i in 0..n {
        for j in 0..n {
            let r = cell_radius(i, j, n);
            sums[r] += psd.values[i * n + j];
            counts[r] += 1;
        }
    }
    SpectralProfile {
        size: n,
        bins: sums
            .iter()
            .zip(counts.iter())
            .map(|(&s, &c)| s / c as f64)
            .collect(),
        n_samples: psd.n_samples,
    }
}

/// Control 2D PSD from `n_pairs` disjoint random unpaired clean
/// differences.
pub fn control_psd(
    cleans: &[ImageBuffer],
    n_pairs: usize,
    rng_seed: u64,
) -> Result<Psd2D> {
    if cleans.len() < 2 * n_pairs {
        return Err(Error::InsufficientImages {
            need: 2 * n_pairs,
            have: cleans.len(),
        });
    }
    let mut order: Vec<usize> = (0..cleans.len()).collect();
    order.shuffle(&mut rng_for(rng_seed, "control-pairs", 0));
    let size = cleans[0].width();
    let psd = psd_parallel(n_pairs, size, true, |k| {
        let a = &cleans[order[2 * k]];
        let b = &cleans[order[2 * k + 1]];
        residual(b, a).expect("control images share geometry")
    });
    Ok(psd)
}

/// Azimuthal control profile (see [`control_psd`]).
pub fn control_profile(
    cleans: &[ImageBuffer],
    n_pairs: usize,
    rng_seed: u64,
) -> Result<SpectralProfile> {
    Ok(radial_profile(&control_psd(cleans, n_pairs, rng_seed)?))
}

/// Per-bin log10 ratio of attack to control, with zero-crossings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogRatioProfile {
    pub size: usize,
    /// log10(attack / control) per bin; NaN where masked.
    pub values: Vec<f64>,
    /// Sign-change frequencies (cycles/pixel), linearly interpolated.
    pub zero_crossings: Vec<f64>,
}

impl LogRatioProfile {
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 / self.size as f64
    }

    /// L2 norm over defined bins.
    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn defined_bins(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }
}

/// Log-ratio of two profiles. Bins where either side is zero are masked.
pub fn log_ratio(
    attack: &SpectralProfile,
    control: &SpectralProfile,
) -> Result<LogRatioProfile> {
    if attack.bins.len() != control.bins.len() {
        return Err(Error::GeometryMismatch(format!(
            "profile bins {} vs {}",
            attack.bins.len(),
            control.bins.len()
        )));
    }
    let values: Vec<f64> = attack
        .bins
        .iter()
        .zip(control.bins.iter())
        .map(|(&a, &c)| if c > 0.0 && a > 0.0 { (a / c).log10() } else { f64::NAN })
        .collect();
    if values.iter().all(|v| v.is_nan()) {
        return Err(Error::AllBinsMasked);
    }

    let mut zero_crossings = Vec::new();
    for k in 0..values.len() - 1 {
        let (a, b) = (values[k], values[k + 1]);
        if a.is_finite() && b.is_finite() && a * b < 0.0 {
            let t = a / (a - b);
            let freq = (k as f64 + t) / attack.size as f64;
            zero_crossings.push(freq);
        }
    }
    Ok(LogRatioProfile { size: attack.size, values, zero_crossings })
}

/// Element-wise 2D log10 ratio, DC-centered; NaN where masked.
pub fn deviation_map_2d(attack: &Psd2D, control: &Psd2D) -> Result<Vec<f64>> {
    if attack.size != control.size {
        return Err(Error::GeometryMismatch(format!(
            "psd size {} vs {}",
            attack.size, control.size
        )));
    }
    let map: Vec<f64> = attack
        .values
        .iter()
        .zip(control.values.iter())
        .map(|(&a, &c)| if c > 0.0 && a > 0.0 { (a / c).log10() } else { f64::NAN })
        .collect();
    if map.iter().all(|v| v.is_nan()) {
        return Err(Error::AllCellsMasked);
    }
    Ok(map)
}
