// SPDX-License-Identifier: Apache-2.0

//! Decoded 8-bit RGB raster, the unit every operator and analysis consumes.

use crate::{Error, Result};

/// Number of channels in every buffer (RGB).
pub const CHANNELS: usize = 3;

/// Standard evaluation-pool edge length in pixels.
pub const STANDARD_SIZE: usize = 512;

/// Decoded 8-bit RGB image with row-major interleaved samples.
///
/// Invariant: `data.len() == width * height * 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl ImageBuffer {
    /// Build a buffer from raw interleaved RGB samples.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::GeometryMismatch("zero-sized image".into()));
        }
        if data.len() != width * height * CHANNELS {
            return Err(Error::GeometryMismatch(format!(
                "expected {} samples for {}x{}x3, got {}",
                width * height * CHANNELS,
                width,
                height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    /// All-zero (black) buffer.
    pub fn zeroed(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0; width * height * CHANNELS] }
    }

    /// Constant-valued buffer.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self { width, height, data: vec![value; width * height * CHANNELS] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Raw interleaved RGB samples, row-major.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    /// Sample at (x, y) for channel c.
    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * CHANNELS + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: u8) {
        self.data[(y * self.width + x) * CHANNELS + c] = v;
    }

    /// Pixel (R, G, B) at (x, y).
    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// True when both buffers share (width, height).
    pub fn same_geometry(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Error unless this buffer is exactly `size` x `size`.
    pub fn expect_square(&self, size: usize) -> Result<()> {
        if self.width != size || self.height != size {
            return Err(Error::GeometryMismatch(format!(
                "expected {size}x{size}, got {}x{}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// One channel as f64 samples in [0, 255].
    pub fn channel_f64(&self, c: usize) -> Vec<f64> {
        self.data.chunks_exact(CHANNELS).map(|p| p[c] as f64).collect()
    }

    /// Unweighted RGB mean per pixel, as f64 in [0, 255].
    pub fn gray_mean_f64(&self) -> Vec<f64> {
        self.data
            .chunks_exact(CHANNELS)
            .map(|p| (p[0] as f64 + p[1] as f64 + p[2] as f64) / 3.0)
            .collect()
    }
}

/// Round and clamp an f64 sample to the 8-bit range.
#[inline]
pub fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}
