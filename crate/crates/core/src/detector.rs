// SPDX-License-Identifier: Apache-2.0

//! Per-image detection scores s(z) in [0, 1] for the clean-vs-attacked
//! task: a spectral-feature logistic-regression detector, plus ingestion
//! of externally computed scores for paper-scale detectors.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetManifest, Split};
use crate::image::ImageBuffer;
use crate::metrics;
use crate::spectral;
use crate::{Error, Result};

/// Radial log-energy features collapsed from the 257-bin profile.
pub const RADIAL_FEATURES: usize = 64;
/// Per-channel mean/variance plus a 10-bin gradient-magnitude histogram.
pub const PIXEL_FEATURES: usize = 16;
/// Total feature dimension.
pub const N_FEATURES: usize = RADIAL_FEATURES + PIXEL_FEATURES;

/// Feature vector; [`extract_features`] yields length [`N_FEATURES`].
pub type FeatureVector = Vec<f64>;

/// 64-group index of radial bin `i` (257 bins collapsed by averaging).
pub fn radial_group(bin: usize) -> usize {
    bin * RADIAL_FEATURES / spectral::PROFILE_BINS
}

/// Deterministic 80-dim feature vector of a 512x512 image.
///
/// Radial features are computed on the image itself (not residuals) with
/// the spectral module's binning collapsed from 257 to 64 by averaging.
pub fn extract_features(img: &ImageBuffer) -> Result<FeatureVector> {
    img.expect_square(crate::image::STANDARD_SIZE)?;
    let mut features = Vec::with_capacity(N_FEATURES);

    let field = spectral::normalized_gray_field(img);
    let psd = spectral::psd([field.as_slice()], img.width());
    let profile = spectral::radial_profile(&psd);
    let mut sums = vec![0.0f64; RADIAL_FEATURES];
    let mut counts = vec![0usize; RADIAL_FEATURES];
    for (i, &b) in profile.bins.iter().enumerate() {
        let g = radial_group(i);
        sums[g] += b;
        counts[g] += 1;
    }
    for (s, c) in sums.iter().zip(counts.iter()) {
        features.push((s / *c as f64 + 1e-20).log10());
    }

    // Per-channel mean and variance in [0, 1] units.
    let n = (img.width() * img.height()) as f64;
    let mut means = [0.0f64; 3];
    for px in img.data().chunks_exact(3) {
        for c in 0..3 {
            means[c] += px[c] as f64;
        }
    }
    for m in means.iter_mut() {
        *m /= n * 255.0;
    }
    let mut vars = [0.0f64; 3];
    for px in img.data().chunks_exact(3) {
        for c in 0..3 {
            let d = px[c] as f64 / 255.0 - means[c];
            vars[c] += d * d;
        }
    }
    features.extend(means);
    features.extend(vars.iter().map(|v| v / n));

    // Gradient-magnitude histogram (central differences, 10 bins of
    // width 5 in 8-bit units, overflow in the last bin).
    let gray = img.gray_mean_f64();
    let (w, h) = (img.width(), img.height());
    let mut hist = [0.0f64; 10];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let gx = (gray[y * w + x + 1] - gray[y * w + x - 1]) / 2.0;
            let gy = (gray[(y + 1) * w + x] - gray[(y - 1) * w + x]) / 2.0;
            let mag = (gx * gx + gy * gy).sqrt();
            let bin = ((mag / 5.0) as usize).min(9);
            hist[bin] += 1.0;
        }
    }
    let total: f64 = hist.iter().sum();
    features.extend(hist.iter().map(|c| c / total));

    debug_assert_eq!(features.len(), N_FEATURES);
    Ok(features)
}

/// Training hyperparameters for the logistic detector.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainHyper {
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        Self { lr: 0.5, epochs: 300, l2: 1e-4, seed: 0 }
    }
}

/// Early-stopping patience on validation AUROC.
pub const EARLY_STOP_PATIENCE: usize = 7;

/// Logistic-regression detector with train-split normalization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-feature normalization fitted on the train split only.
    pub feature_mean: Vec<f64>,
    pub feature_std: Vec<f64>,
    pub hyper: TrainHyper,
    /// Epoch whose weights were kept by early stopping.
    pub best_epoch: usize,
    pub val_auroc: f64,
}

impl LinearModel {
    /// Score one raw (unnormalized) feature vector.
    pub fn predict(&self, features: &[f64]) -> f64 {
        let mut z = self.bias;
        for ((&x, &m), (&s, &w)) in features
            .iter()
            .zip(self.feature_mean.iter())
            .zip(self.feature_std.iter().zip(self.weights.iter()))
        {
            z += w * (x - m) / s;
        }
        sigmoid(z)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable ln(1 + e^z).
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean logistic loss with L2 penalty on the weights (bias unpenalized),
/// and its analytic gradient.
pub fn loss_and_grad(
    weights: &[f64],
    bias: f64,
    xs: &[Vec<f64>],
    ys: &[u8],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = xs.len() as f64;
    let dim = weights.len();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0f64; dim];
    let mut grad_b = 0.0f64;
    for (x, &y) in xs.iter().zip(ys.iter()) {
        let z = bias + x.iter().zip(weights.iter()).map(|(a, b)| a * b).sum::<f64>();
        loss += softplus(z) - y as f64 * z;
        let err = sigmoid(z) - y as f64;
        for (g, &xi) in grad_w.iter_mut().zip(x.iter()) {
            *g += err * xi;
        }
        grad_b += err;
    }
    loss /= n;
    for (g, &w) in grad_w.iter_mut().zip(weights.iter()) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (loss, grad_w, grad_b / n)
}

fn gather_split(
    manifest: &DatasetManifest,
    features: &BTreeMap<String, FeatureVector>,
    split: Split,
) -> Result<(Vec<Vec<f64>>, Vec<u8>, Vec<String>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ids = Vec::new();
    for r in manifest.records.iter().filter(|r| r.split == split) {
        let f = features
            .get(&r.id)
            .ok_or_else(|| Error::MissingFeatures(r.id.clone()))?;
        xs.push(f.clone());
        ys.push(r.label);
        ids.push(r.id.clone());
    }
    Ok((xs, ys, ids))
}

/// Train by full-batch gradient descent with early stopping on
/// validation AUROC (patience 7). Deterministic: zero initialization and
/// a fixed epoch schedule.
pub fn train(
    manifest: &DatasetManifest,
    features: &BTreeMap<String, FeatureVector>,
    hyper: TrainHyper,
) -> Result<LinearModel> {
    let (mut xs, ys, _) = gather_split(manifest, features, Split::Train)?;
    let (mut val_xs, val_ys, _) = gather_split(manifest, features, Split::Val)?;
    for (name, labels) in [("train", &ys), ("val", &val_ys)] {
        let pos = labels.iter().filter(|&&y| y == 1).count();
        if labels.is_empty() || pos == 0 || pos == labels.len() {
            return Err(Error::DegenerateSplit(format!(
                "{name} split lacks one of the two labels"
            )));
        }
    }
    let dim = xs[0].len();

    // Normalization statistics from the train split only.
    let n = xs.len() as f64;
    let mut mean = vec![0.0f64; dim];
    for x in &xs {
        for (m, &v) in mean.iter_mut().zip(x.iter()) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut std = vec![0.0f64; dim];
    for x in &xs {
        for ((s, &v), &m) in std.iter_mut().zip(x.iter()).zip(mean.iter()) {
            *s += (v - m) * (v - m);
        }
    }
    for s in std.iter_mut() {
        *s = (*s / n).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let normalize = |set: &mut Vec<Vec<f64>>| {
        for x in set.iter_mut() {
            for ((v, &m), &s) in x.iter_mut().zip(mean.iter()).zip(std.iter()) {
                *v = (*v - m) / s;
            }
        }
    };
    normalize(&mut xs);
    normalize(&mut val_xs);

    let val_auroc = |w: &[f64], b: f64| -> Result<f64> {
        let pairs: Vec<(bool, f64)> = val_xs
            .iter()
            .zip(val_ys.iter())
            .map(|(x, &y)| {
                let z = b + x.iter().zip(w.iter()).map(|(a, c)| a * c).sum::<f64>();
                (y == 1, sigmoid(z))
            })
            .collect();
        metrics::auroc_pairs(&pairs)
    };

    let mut w = vec![0.0f64; dim];
    let mut b = 0.0f64;
    let mut best_w = w.clone();
    let mut best_b = b;
    let mut best_auroc = val_auroc(&w, b)?;
    let mut best_epoch = 0usize;
    let mut patience = 0usize;
    for epoch in 1..=hyper.epochs {
        let (_, gw, gb) = loss_and_grad(&w, b, &xs, &ys, hyper.l2);
        for (wi, gi) in w.iter_mut().zip(gw.iter()) {
            *wi -= hyper.lr * gi;
        }
        b -= hyper.lr * gb;
        let auroc = val_auroc(&w, b)?;
        if auroc > best_auroc {
            best_auroc = auroc;
            best_w.copy_from_slice(&w);
            best_b = b;
            best_epoch = epoch;
            patience = 0;
        } else {
            patience += 1;
            if patience >= EARLY_STOP_PATIENCE {
                break;
            }
        }
    }

    Ok(LinearModel {
        weights: best_w,
        bias: best_b,
        feature_mean: mean,
        feature_std: std,
        hyper,
        best_epoch,
        val_auroc: best_auroc,
    })
}

/// Where a score set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Native,
    External,
}

/// One scored image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub id: String,
    pub label: u8,
    pub score: f64,
}

/// Per-image detector scores with labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreSet {
    pub entries: Vec<ScoreEntry>,
    pub provenance: Provenance,
}

impl ScoreSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Score every record of a split (or all records) through the model.
pub fn score(
    model: &LinearModel,
    manifest: &DatasetManifest,
    features: &BTreeMap<String, FeatureVector>,
    split: Option<Split>,
) -> Result<ScoreSet> {
    let mut entries = Vec::new();
    for r in &manifest.records {
        if let Some(s) = split {
            if r.split != s {
                continue;
            }
        }
        let f = features
            .get(&r.id)
            .ok_or_else(|| Error::MissingFeatures(r.id.clone()))?;
        entries.push(ScoreEntry {
            id: r.id.clone(),
            label: r.label,
            score: model.predict(f),
        });
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(ScoreSet { entries, provenance: Provenance::Native })
}

/// Read a `id,score` CSV (header required) and join manifest labels.
pub fn ingest_scores(path: &Path, manifest: &DatasetManifest) -> Result<ScoreSet> {
    let text = std::fs::read_to_string(path)?;
    let labels: BTreeMap<&str, u8> = manifest
        .records
        .iter()
        .map(|r| (r.id.as_str(), r.label))
        .collect();

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_start_matches('\u{feff}').trim() == "id,score" => {}
        other => {
            return Err(Error::MalformedRow {
                row: 0,
                detail: format!(
                    "expected header 'id,score', got {:?}",
                    other.map(|(_, l)| l).unwrap_or("")
                ),
            });
        }
    }

    let mut seen = std::collections::BTreeSet::new();
    let mut entries = Vec::new();
    for (idx, line) in lines {
        let row = idx; // header was row 0
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (id, score_str) = match (parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(s), None) => (id.trim(), s.trim()),
            _ => {
                return Err(Error::MalformedRow {
                    row,
                    detail: "expected exactly two fields".into(),
                })
            }
        };
        let score: f64 = score_str.parse().map_err(|_| Error::MalformedRow {
            row,
            detail: format!("score '{score_str}' is not a number"),
        })?;
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::ScoreOutOfRange { row, value: score });
        }
        let label = *labels
            .get(id)
            .ok_or_else(|| Error::UnknownId(id.to_string(), row))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::MalformedRow {
                row,
                detail: format!("duplicate id {id}"),
            });
        }
        entries.push(ScoreEntry { id: id.to_string(), label, score });
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(ScoreSet { entries, provenance: Provenance::External })
}

/// Write scores as the same `id,score` CSV accepted by [`ingest_scores`].
pub fn write_scores_csv(scores: &ScoreSet, path: &Path) -> Result<()> {
    let mut out = String::from("id,score\n");
    for e in &scores.entries {
        out.push_str(&format!("{},{}\n", e.id, e.score));
    }
    std::fs::write(path, out)?;
    Ok(())
}
