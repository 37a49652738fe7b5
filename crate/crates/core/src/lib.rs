// SPDX-License-Identifier: Apache-2.0

//! Core library for evaluating whether an image-to-image transform is
//! *forensically stealthy*: whether its outputs can be told apart from
//! ordinary clean releases by an image-only test.
//!
//! The crate is organized around the evaluation pipeline:
//!
//! - [`imageio`]: deterministic PNG/JPEG/BMP codecs and container audits,
//!   so that every learnable signal provably comes from pixels.
//! - [`ops`]: the ten lightweight tamper operators and the channel probes
//!   applied identically to both classes.
//! - [`dataset`]: clean/attacked/tampered dataset construction with
//!   origin-disjoint classes, stratified splits, and integrity audits.
//! - [`detector`]: a spectral-feature logistic-regression detector plus
//!   ingestion of externally computed scores.
//! - [`metrics`]: ROC/AUROC at low-FPR operating points with seeded
//!   bootstrap confidence intervals.
//! - [`spectral`]: residual power-spectral-density fingerprints (radial
//!   log-ratio profiles and 2D deviation maps).
//! - [`stealth`]: a synthetic keyed watermark, the three-term stealth
//!   objective, and a guided random-walk remover.
//! - [`synth`]: seeded synthetic image generation used for fixtures and
//!   desk-scale experiments.

pub mod dataset;
pub mod detector;
pub mod error;
pub mod image;
pub mod imageio;
pub mod metrics;
pub mod ops;
pub mod seeds;
pub mod spectral;
pub mod stealth;
pub mod synth;

pub use error::Error;
pub use image::ImageBuffer;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
