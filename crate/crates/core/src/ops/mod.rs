// SPDX-License-Identifier: Apache-2.0

//! The ten post-processing tamper operators (A01..A10) and the channel
//! probes, applied identically to clean and attacked classes.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::image::{ImageBuffer, STANDARD_SIZE};
use crate::imageio::{self, ChromaSubsampling};
use crate::seeds::rng_for;
use crate::{Error, Result};

pub mod color;
pub mod filters;
pub mod resample;

pub use filters::gaussian_blur;
pub use resample::Kernel;

/// Operator identifiers, matching the published sampling table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum OperatorId {
    A01,
    A02,
    A03,
    A04,
    A05,
    A06,
    A07,
    A08,
    A09,
    A10,
}

/// All ten operators in order.
pub const ALL_OPERATORS: [OperatorId; 10] = [
    OperatorId::A01,
    OperatorId::A02,
    OperatorId::A03,
    OperatorId::A04,
    OperatorId::A05,
    OperatorId::A06,
    OperatorId::A07,
    OperatorId::A08,
    OperatorId::A09,
    OperatorId::A10,
];

impl OperatorId {
    /// Parameter sampling set for this operator.
    pub fn parameter_set(self) -> &'static [f64] {
        match self {
            OperatorId::A01 => &[74.0, 76.0, 78.0, 80.0, 82.0, 84.0, 86.0, 88.0],
            OperatorId::A02 => &[420.0, 422.0],
            OperatorId::A03 => &[5.0, 6.0, 7.0],
            OperatorId::A04 => &[0.35, 0.5, 0.7, 0.9, 1.1, 1.35],
            OperatorId::A05 => &[45.0, 60.0, 75.0, 90.0],
            OperatorId::A06 => &[7.0, 8.0, 9.0, 10.0, 11.0, 12.0],
            OperatorId::A07 => &[8.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0],
            OperatorId::A08 => &[-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0],
            OperatorId::A09 => &[336.0, 384.0, 448.0],
            OperatorId::A10 => &[-6.0, -4.0, -2.0, 2.0, 4.0, 6.0],
        }
    }

    /// Short human name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            OperatorId::A01 => "jpeg_recompression",
            OperatorId::A02 => "chroma_subsampling",
            OperatorId::A03 => "quantization",
            OperatorId::A04 => "gaussian_blur",
            OperatorId::A05 => "bilateral_filter",
            OperatorId::A06 => "non_local_means",
            OperatorId::A07 => "crop_resize",
            OperatorId::A08 => "rotation_crop",
            OperatorId::A09 => "scaling",
            OperatorId::A10 => "color_jitter_hue",
        }
    }
}

impl std::fmt::Display for OperatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for OperatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_OPERATORS
            .iter()
            .copied()
            .find(|op| format!("{op:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter {
                operator: s.to_string(),
                detail: "unknown operator id".into(),
            })
    }
}

/// A fully specified tamper operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub id: OperatorId,
    pub parameter: f64,
    pub rng_seed: u64,
}

impl OperatorSpec {
    pub fn new(id: OperatorId, parameter: f64, rng_seed: u64) -> Result<Self> {
        validate_parameter(id, parameter)?;
        Ok(Self { id, parameter, rng_seed })
    }
}

fn validate_parameter(id: OperatorId, parameter: f64) -> Result<()> {
    // Test-only escape hatch: a zero-pixel crop is the identity.
    if id == OperatorId::A07 && parameter == 0.0 {
        return Ok(());
    }
    if id.parameter_set().iter().any(|&p| p == parameter) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            operator: id.to_string(),
            detail: format!("{parameter} not in sampling set"),
        })
    }
}

/// Draw a uniformly random operator with a uniformly random parameter.
pub fn sample_operator(rng_seed: u64) -> OperatorSpec {
    let mut rng = rng_for(rng_seed, "sample-operator", 0);
    let id = *ALL_OPERATORS.choose(&mut rng).unwrap();
    let parameter = *id.parameter_set().choose(&mut rng).unwrap();
    OperatorSpec { id, parameter, rng_seed }
}

/// Sample only the parameter for a fixed operator id.
pub fn sample_parameter(id: OperatorId, rng_seed: u64) -> OperatorSpec {
    let mut rng = rng_for(rng_seed, "sample-parameter", 0);
    let parameter = *id.parameter_set().choose(&mut rng).unwrap();
    OperatorSpec { id, parameter, rng_seed }
}

/// Apply a tamper operator. Geometry (512x512x3) is preserved.
pub fn apply(img: &ImageBuffer, spec: &OperatorSpec) -> Result<ImageBuffer> {
    img.expect_square(STANDARD_SIZE)?;
    validate_parameter(spec.id, spec.parameter)?;
    let p = spec.parameter;
    match spec.id {
        OperatorId::A01 => {
            let bytes = imageio::encode_jpeg(img, p as u8, ChromaSubsampling::S420)?;
            imageio::decode_bytes(&bytes)
        }
        OperatorId::A02 => Ok(chroma_subsample(img, p as u32)),
        OperatorId::A03 => Ok(quantize_levels(img, p as u32)),
        OperatorId::A04 => Ok(filters::gaussian_blur(img, p)),
        OperatorId::A05 => Ok(filters::bilateral(img, p, 3.0)),
        OperatorId::A06 => Ok(filters::non_local_means(img, p)),
        OperatorId::A07 => Ok(crop_resize(img, p as usize)),
        OperatorId::A08 => Ok(rotate_crop_resize(img, p)),
        OperatorId::A09 => Ok(scale_down_up(img, p as usize)),
        OperatorId::A10 => Ok(hue_shift(img, p as i32)),
    }
}

/// A02: box-downsample chroma, bilinear-upsample, convert back.
fn chroma_subsample(img: &ImageBuffer, mode: u32) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let (fh, fv) = if mode == 420 { (2, 2) } else { (2, 1) };
    let [y, cb, cr] = color::rgb_to_ycbcr(img);

    let down = |plane: &[f64]| -> (Vec<f64>, usize, usize) {
        let dw = w / fh;
        let dh = h / fv;
        let mut out = vec![0.0; dw * dh];
        for oy in 0..dh {
            for ox in 0..dw {
                let mut acc = 0.0;
                for dy in 0..fv {
                    for dx in 0..fh {
                        acc += plane[(oy * fv + dy) * w + ox * fh + dx];
                    }
                }
                out[oy * dw + ox] = acc / (fh * fv) as f64;
            }
        }
        (out, dw, dh)
    };

    let (cb_d, dw, dh) = down(&cb);
    let (cr_d, _, _) = down(&cr);
    let cb_up = resample::resize_plane(&cb_d, dw, dh, w, h, Kernel::Bilinear);
    let cr_up = resample::resize_plane(&cr_d, dw, dh, w, h, Kernel::Bilinear);
    color::ycbcr_to_rgb(&[y, cb_up, cr_up], w, h)
}

/// A03: snap every channel to the nearest of 2^bits evenly spaced levels.
fn quantize_levels(img: &ImageBuffer, bits: u32) -> ImageBuffer {
    let step = 256.0 / (1u32 << bits) as f64;
    let mut out = img.clone();
    for b in out.data_mut() {
        *b = ((*b as f64 / step).round() * step).clamp(0.0, 255.0) as u8;
    }
    out
}

/// A07: crop `pixels` from every border, bilinear resize back.
fn crop_resize(img: &ImageBuffer, pixels: usize) -> ImageBuffer {
    if pixels == 0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let cw = w - 2 * pixels;
    let ch = h - 2 * pixels;
    let mut crop = ImageBuffer::zeroed(cw, ch);
    for y in 0..ch {
        for x in 0..cw {
            for c in 0..3 {
                crop.set(x, y, c, img.get(x + pixels, y + pixels, c));
            }
        }
    }
    resample::resize(&crop, w, h, Kernel::Bilinear)
}

/// A08: rotate, center-crop the largest valid axis-aligned square, resize.
fn rotate_crop_resize(img: &ImageBuffer, degrees: f64) -> ImageBuffer {
    let size = img.width();
    let rotated = resample::rotate_bilinear(img, degrees);
    let theta = degrees.to_radians().abs();
    let side = (size as f64 / (theta.cos() + theta.sin())).floor() as usize;
    let cropped = resample::center_crop(&rotated, side);
    resample::resize(&cropped, size, size, Kernel::Bilinear)
}

/// A09: bilinear down to target x target, Lanczos-3 back up.
fn scale_down_up(img: &ImageBuffer, target: usize) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    let down = resample::resize(img, target, target, Kernel::Bilinear);
    resample::resize(&down, w, h, Kernel::Lanczos3)
}

/// A10: hue offset with wrap-around on the 8-bit [0, 180) hue scale.
fn hue_shift(img: &ImageBuffer, shift: i32) -> ImageBuffer {
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        let (h, s, v) = color::rgb_to_hsv8(px[0], px[1], px[2]);
        let h2 = (h as i32 + shift).rem_euclid(180) as u8;
        let (r, g, b) = color::hsv8_to_rgb(h2, s, v);
        px[0] = r;
        px[1] = g;
        px[2] = b;
    }
    out
}

/// Representation-control probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelProbe {
    /// Container change only; pixels identical.
    Bmp,
    /// Container change only; pixels identical.
    CanonicalPng,
    /// BT.601 luma replicated to three channels.
    Grayscale,
    /// Bilinear down to 256, Lanczos-3 back to 512.
    DownUp,
    /// JPEG Q75, bilinear resize to 80%, JPEG Q85, resize back.
    SocialMedia,
}

/// All probes in report order.
pub const ALL_PROBES: [ChannelProbe; 5] = [
    ChannelProbe::Bmp,
    ChannelProbe::CanonicalPng,
    ChannelProbe::Grayscale,
    ChannelProbe::DownUp,
    ChannelProbe::SocialMedia,
];

impl ChannelProbe {
    pub fn name(self) -> &'static str {
        match self {
            ChannelProbe::Bmp => "bmp",
            ChannelProbe::CanonicalPng => "canonical_png",
            ChannelProbe::Grayscale => "grayscale",
            ChannelProbe::DownUp => "down_up",
            ChannelProbe::SocialMedia => "social_media",
        }
    }
}

/// Apply a channel probe to a 512x512 buffer.
pub fn apply_probe(img: &ImageBuffer, probe: ChannelProbe) -> Result<ImageBuffer> {
    img.expect_square(STANDARD_SIZE)?;
    match probe {
        // The container change is handled at the file layer; pixels pass
        // through untouched.
        ChannelProbe::Bmp | ChannelProbe::CanonicalPng => Ok(img.clone()),
        ChannelProbe::Grayscale => Ok(color::grayscale_bt601(img)),
        ChannelProbe::DownUp => {
            let down = resample::resize(img, 256, 256, Kernel::Bilinear);
            Ok(resample::resize(&down, 512, 512, Kernel::Lanczos3))
        }
        ChannelProbe::SocialMedia => {
            let q75 = imageio::encode_jpeg(img, 75, ChromaSubsampling::S420)?;
            let img = imageio::decode_bytes(&q75)?;
            let small = resample::resize(&img, 410, 410, Kernel::Bilinear);
            let q85 = imageio::encode_jpeg(&small, 85, ChromaSubsampling::S420)?;
            let img = imageio::decode_bytes(&q85)?;
            Ok(resample::resize(&img, 512, 512, Kernel::Bilinear))
        }
    }
}

/// Pixel-level distortion summary between two equal-geometry buffers.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DistortionStats {
    /// 10 log10(255^2 / MSE) over all samples; +inf when MSE = 0.
    pub psnr: f64,
    /// Mean |a - b| in 8-bit units.
    pub mean_abs_diff: f64,
    /// Fraction of pixel positions with any channel differing.
    pub changed_fraction: f64,
}

/// Compare two buffers sample-by-sample.
pub fn distortion_stats(a: &ImageBuffer, b: &ImageBuffer) -> Result<DistortionStats> {
    if !a.same_geometry(b) {
        return Err(Error::GeometryMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let n = a.data().len();
    let mut sq = 0.0f64;
    let mut abs = 0.0f64;
    let mut changed = 0usize;
    for (pa, pb) in a.data().chunks_exact(3).zip(b.data().chunks_exact(3)) {
        let mut any = false;
        for c in 0..3 {
            let d = pa[c] as f64 - pb[c] as f64;
            sq += d * d;
            abs += d.abs();
            any |= pa[c] != pb[c];
        }
        changed += any as usize;
    }
    let mse = sq / n as f64;
    let psnr = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    };
    Ok(DistortionStats {
        psnr,
        mean_abs_diff: abs / n as f64,
        changed_fraction: changed as f64 / (a.width() * a.height()) as f64,
    })
}

/// PSNR between two buffers (convenience for the stealth objective).
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    Ok(distortion_stats(a, b)?.psnr)
}

#[cfg(test)]
mod tests;
