// SPDX-License-Identifier: Apache-2.0

//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the evaluation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// File is not one of the supported container formats.
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// File is structurally damaged (truncation, bad checksum, bad marker).
    #[error("corrupt file {path}: {detail}")]
    CorruptFile { path: PathBuf, detail: String },

    /// JPEG quality outside 1..=100.
    #[error("invalid JPEG quality {0} (expected 1..=100)")]
    InvalidQuality(i64),

    /// Image geometry does not match what the operation requires.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// Operator parameter outside its sampling set.
    #[error("invalid parameter for operator {operator}: {detail}")]
    InvalidParameter { operator: String, detail: String },

    /// A transform failed to preserve geometry during dataset construction.
    #[error("transform changed geometry: {0}")]
    TransformGeometryError(String),

    /// Dataset construction was given no usable images.
    #[error("empty image pool")]
    EmptyPool,

    /// A manifest references a file that is not on disk.
    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    /// A split required for training lacks one of the two labels.
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    /// Scoring was asked for an id with no extracted features.
    #[error("missing features for id {0}")]
    MissingFeatures(String),

    /// Ingested score references an id absent from the manifest.
    #[error("unknown id in score file: {0} (row {1})")]
    UnknownId(String, usize),

    /// Ingested score outside [0, 1].
    #[error("score out of range at row {row}: {value}")]
    ScoreOutOfRange { row: usize, value: f64 },

    /// Score CSV row that does not parse as `id,score`.
    #[error("malformed row {row}: {detail}")]
    MalformedRow { row: usize, detail: String },

    /// Metric computation requires both labels present.
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    /// Control profile construction needs at least 2 * n_pairs images.
    #[error("insufficient images: need {need}, have {have}")]
    InsufficientImages { need: usize, have: usize },

    /// Every control bin is zero; no log-ratio is defined.
    #[error("all control bins are masked")]
    AllBinsMasked,

    /// Every control cell is zero; no 2D deviation map is defined.
    #[error("all control cells are masked")]
    AllCellsMasked,

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
