// SPDX-License-Identifier: Apache-2.0

//! ROC-based detection metrics at low-FPR operating points, with seeded
//! bootstrap confidence intervals and scalar-baseline AUCs.
//!
//! Tie handling everywhere is the grouped-threshold convention: all equal
//! scores cross the threshold together, which makes the trapezoidal AUROC
//! equal the Mann-Whitney U statistic with half credit for ties.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::detector::ScoreSet;
use crate::seeds::rng_for;
use crate::{Error, Result};

/// One ROC point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores >= threshold are predicted positive; +inf at (0, 0).
    pub threshold: f64,
}

/// ROC curve from sweeping all distinct score thresholds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Trapezoidal area under the curve.
    pub fn auroc(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
            .sum()
    }
}

/// Internal view: (is_positive, score).
fn labeled(scores: &ScoreSet) -> Vec<(bool, f64)> {
    scores.entries.iter().map(|e| (e.label == 1, e.score)).collect()
}

fn check_both_labels(pairs: &[(bool, f64)]) -> Result<()> {
    let pos = pairs.iter().filter(|(l, _)| *l).count();
    if pos == 0 || pos == pairs.len() {
        return Err(Error::DegenerateLabels(format!(
            "{} positives of {} entries",
            pos,
            pairs.len()
        )));
    }
    Ok(())
}

fn roc_from_pairs(pairs: &[(bool, f64)]) -> Result<RocCurve> {
    check_both_labels(pairs)?;
    let n_pos = pairs.iter().filter(|(l, _)| *l).count() as f64;
    let n_neg = pairs.len() as f64 - n_pos;

    let mut sorted: Vec<(bool, f64)> = pairs.to_vec();
    sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY }];
    let mut tp = 0f64;
    let mut fp = 0f64;
    let mut i = 0usize;
    while i < sorted.len() {
        let threshold = sorted[i].1;
        // All entries tied at this score cross together.
        while i < sorted.len() && sorted[i].1 == threshold {
            if sorted[i].0 {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            i += 1;
        }
        points.push(RocPoint { fpr: fp / n_neg, tpr: tp / n_pos, threshold });
    }
    Ok(RocCurve { points })
}

/// ROC curve of a score set.
pub fn roc(scores: &ScoreSet) -> Result<RocCurve> {
    roc_from_pairs(&labeled(scores))
}

/// AUROC without materializing the curve struct at call sites.
pub fn auroc(scores: &ScoreSet) -> Result<f64> {
    Ok(roc(scores)?.auroc())
}

/// AUROC on raw (is_positive, score) pairs; used by detector training.
pub fn auroc_pairs(pairs: &[(bool, f64)]) -> Result<f64> {
    Ok(roc_from_pairs(pairs)?.auroc())
}

/// Linearly interpolated TPR at the target FPR.
///
/// Where the curve is vertical at exactly the target FPR, the topmost
/// point is used, keeping the result non-decreasing in the target.
pub fn tpr_at_fpr(curve: &RocCurve, target: f64) -> f64 {
    let pts = &curve.points;
    let mut exact: Option<f64> = None;
    for p in pts {
        if p.fpr == target {
            exact = Some(exact.map_or(p.tpr, |t: f64| t.max(p.tpr)));
        }
    }
    if let Some(t) = exact {
        return t;
    }
    // No exact hit: interpolate between the bracketing points.
    let mut prev = pts[0];
    for &p in pts.iter().skip(1) {
        if p.fpr > target {
            let span = p.fpr - prev.fpr;
            if span <= 0.0 {
                return prev.tpr;
            }
            let t = (target - prev.fpr) / span;
            return prev.tpr + t * (p.tpr - prev.tpr);
        }
        prev = p;
    }
    prev.tpr
}

/// AUROC of a raw scalar (larger = more attacked), e.g. file size.
pub fn auc_from_scalar(values: &[(u8, f64)]) -> Result<f64> {
    let pairs: Vec<(bool, f64)> =
        values.iter().map(|&(l, v)| (l == 1, v)).collect();
    auroc_pairs(&pairs)
}

/// ceil(n_clean * fpr) with a guard against binary-float dust.
pub fn fp_count(n_clean: usize, fpr: f64) -> usize {
    let x = n_clean as f64 * fpr;
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// FP budget per operating point.
pub fn fp_counts(n_clean: usize, fprs: &[f64]) -> Vec<(f64, usize)> {
    fprs.iter().map(|&f| (f, fp_count(n_clean, f))).collect()
}

/// Bootstrap target metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BootstrapMetric {
    Auroc,
    TprAtFpr(f64),
}

impl BootstrapMetric {
    fn eval(self, pairs: &[(bool, f64)]) -> Result<f64> {
        let curve = roc_from_pairs(pairs)?;
        Ok(match self {
            BootstrapMetric::Auroc => curve.auroc(),
            BootstrapMetric::TprAtFpr(t) => tpr_at_fpr(&curve, t),
        })
    }
}

/// Linear-interpolation percentile of a sorted sample (numpy convention).
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Seeded nonparametric bootstrap: percentile 95% interval.
///
/// Each resample draws entries with replacement; single-label resamples
/// are redrawn so exactly `resamples` valid statistics enter the
/// percentiles. Per-resample RNGs are derived from (seed, index), so
/// parallel and serial evaluation agree bit-for-bit.
pub fn bootstrap_ci(
    scores: &ScoreSet,
    metric: BootstrapMetric,
    resamples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let pairs = labeled(scores);
    check_both_labels(&pairs)?;
    let n = pairs.len();

    use rayon::prelude::*;
    let stats: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, "bootstrap", i as u64);
            loop {
                let resample: Vec<(bool, f64)> =
                    (0..n).map(|_| pairs[rng.gen_range(0..n)]).collect();
                if let Ok(v) = metric.eval(&resample) {
                    return v;
                }
                // Single-label resample: redraw from the same stream.
            }
        })
        .collect();

    let mut sorted = stats;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((percentile(&sorted, 2.5), percentile(&sorted, 97.5)))
}

/// Confusion counts at a fixed threshold (score >= t is positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

/// Aggregate detection report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub n_clean: usize,
    pub n_attacked: usize,
    pub auroc: f64,
    /// Accuracy at fixed threshold 0.5.
    pub accuracy: f64,
    /// (fpr, tpr) at the standard operating points 1% and 0.1%.
    pub tpr_at_fpr: Vec<(f64, f64)>,
    pub confusion: Confusion,
    /// Metric name -> (lo, hi) bootstrap 95% CI, when requested.
    pub ci: BTreeMap<String, (f64, f64)>,
}

/// Standard operating points reported everywhere.
pub const OPERATING_POINTS: [f64; 2] = [0.01, 0.001];

/// Bootstrap configuration for [`MetricReport::compute`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { resamples: 10_000, seed: 0 }
    }
}

impl MetricReport {
    /// Full report; bootstrap CIs included when `bootstrap` is set.
    pub fn compute(
        scores: &ScoreSet,
        bootstrap: Option<BootstrapConfig>,
    ) -> Result<Self> {
        let curve = roc(scores)?;
        let mut confusion = Confusion { tp: 0, fp: 0, tn: 0, fn_: 0 };
        for e in &scores.entries {
            let predicted = e.score >= 0.5;
            match (e.label == 1, predicted) {
                (true, true) => confusion.tp += 1,
                (true, false) => confusion.fn_ += 1,
                (false, true) => confusion.fp += 1,
                (false, false) => confusion.tn += 1,
            }
        }
        let n = scores.entries.len();
        let mut ci = BTreeMap::new();
        if let Some(cfg) = bootstrap {
            ci.insert(
                "auroc".to_string(),
                bootstrap_ci(scores, BootstrapMetric::Auroc, cfg.resamples, cfg.seed)?,
            );
            for &fpr in &OPERATING_POINTS {
                ci.insert(
                    format!("tpr@fpr={fpr}"),
                    bootstrap_ci(
                        scores,
                        BootstrapMetric::TprAtFpr(fpr),
                        cfg.resamples,
                        cfg.seed,
                    )?,
                );
            }
        }
        Ok(MetricReport {
            n_clean: confusion.fp + confusion.tn,
            n_attacked: confusion.tp + confusion.fn_,
            auroc: curve.auroc(),
            accuracy: (confusion.tp + confusion.tn) as f64 / n as f64,
            tpr_at_fpr: OPERATING_POINTS
                .iter()
                .map(|&f| (f, tpr_at_fpr(&curve, f)))
                .collect(),
            confusion,
            ci,
        })
    }
}

/// Score threshold realizing the `ceil(n_clean * fpr)` FP budget on a set
/// of clean scores: the k-th largest clean score, predictions using >=.
pub fn threshold_for_fpr(clean_scores: &[f64], fpr: f64) -> f64 {
    let mut sorted = clean_scores.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k = fp_count(sorted.len(), fpr).max(1);
    sorted[(k - 1).min(sorted.len() - 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{Provenance, ScoreEntry, ScoreSet};

    fn score_set(pos: &[f64], neg: &[f64]) -> ScoreSet {
        let mut entries = Vec::new();
        for (i, &s) in pos.iter().enumerate() {
            entries.push(ScoreEntry { id: format!("p{i}"), label: 1, score: s });
        }
        for (i, &s) in neg.iter().enumerate() {
            entries.push(ScoreEntry { id: format!("n{i}"), label: 0, score: s });
        }
        ScoreSet { entries, provenance: Provenance::Native }
    }

    /// O(n^2) Mann-Whitney oracle with half credit for ties.
    fn pairwise_auc(pos: &[f64], neg: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &p in pos {
            for &n in neg {
                if p > n {
                    acc += 1.0;
                } else if p == n {
                    acc += 0.5;
                }
            }
        }
        acc / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn perfect_separation_is_auroc_one() {
        let s = score_set(&[0.9, 0.8], &[0.2, 0.1]);
        assert_eq!(auroc(&s).unwrap(), 1.0);
    }

    #[test]
    fn all_equal_scores_is_diagonal() {
        let s = score_set(&[0.5; 10], &[0.5; 10]);
        let curve = roc(&s).unwrap();
        assert_eq!(curve.auroc(), 0.5);
        assert_eq!(curve.points.len(), 2);
        assert_eq!(curve.points[1].fpr, 1.0);
        assert_eq!(curve.points[1].tpr, 1.0);
    }

    #[test]
    fn auroc_matches_pairwise_oracle() {
        for trial in 0..100u64 {
            let mut rng = rng_for(trial, "auc-test", 0);
            let n_pos = rng.gen_range(2..100);
            let n_neg = rng.gen_range(2..100);
            // Coarse grid forces plenty of ties.
            let pos: Vec<f64> =
                (0..n_pos).map(|_| rng.gen_range(0..20) as f64 / 19.0).collect();
            let neg: Vec<f64> =
                (0..n_neg).map(|_| rng.gen_range(0..20) as f64 / 19.0).collect();
            let fast = auroc(&score_set(&pos, &neg)).unwrap();
            let oracle = pairwise_auc(&pos, &neg);
            assert!((fast - oracle).abs() < 1e-12, "trial {trial}");
        }
    }

    #[test]
    fn degenerate_labels_are_rejected() {
        let s = score_set(&[0.5, 0.9], &[]);
        assert!(matches!(auroc(&s), Err(Error::DegenerateLabels(_))));
    }

    #[test]
    fn tpr_interpolation_cases() {
        let curve = RocCurve {
            points: vec![
                RocPoint { fpr: 0.0, tpr: 0.5, threshold: f64::INFINITY },
                RocPoint { fpr: 0.02, tpr: 0.9, threshold: 0.7 },
                RocPoint { fpr: 1.0, tpr: 1.0, threshold: 0.0 },
            ],
        };
        assert!((tpr_at_fpr(&curve, 0.01) - 0.7).abs() < 1e-12);

        let exact = RocCurve {
            points: vec![
                RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY },
                RocPoint { fpr: 0.01, tpr: 0.93, threshold: 0.5 },
                RocPoint { fpr: 1.0, tpr: 1.0, threshold: 0.0 },
            ],
        };
        assert_eq!(tpr_at_fpr(&exact, 0.01), 0.93);
        assert!(tpr_at_fpr(&exact, 1.0 - 1e-9) > 0.999_999);
    }

    #[test]
    fn tpr_at_fpr_is_monotone_in_target() {
        let mut rng = rng_for(9, "mono", 0);
        let pos: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..1.0)).collect();
        let neg: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..0.8)).collect();
        let curve = roc(&score_set(&pos, &neg)).unwrap();
        let mut last = 0.0;
        for i in 1..100 {
            let t = i as f64 / 100.0;
            let v = tpr_at_fpr(&curve, t);
            assert!(v >= last - 1e-12);
            last = v;
        }
    }

    #[test]
    fn auroc_invariant_under_monotone_transform() {
        let mut rng = rng_for(4, "monotone", 0);
        let pos: Vec<f64> = (0..40).map(|_| rng.gen_range(0.0..1.0)).collect();
        let neg: Vec<f64> = (0..40).map(|_| rng.gen_range(0.0..1.0)).collect();
        let a = auroc(&score_set(&pos, &neg)).unwrap();
        let squash = |v: f64| 1.0 / (1.0 + (-5.0 * v).exp());
        let pos2: Vec<f64> = pos.iter().map(|&v| squash(v)).collect();
        let neg2: Vec<f64> = neg.iter().map(|&v| squash(v)).collect();
        let b = auroc(&score_set(&pos2, &neg2)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn scalar_auc_cases() {
        // All equal -> exactly one half.
        let vals: Vec<(u8, f64)> =
            (0..20).map(|i| ((i % 2) as u8, 123.0)).collect();
        assert_eq!(auc_from_scalar(&vals).unwrap(), 0.5);

        // Attacked strictly larger -> 1.
        let vals: Vec<(u8, f64)> = (0..10)
            .map(|i| (1u8, 1000.0 + i as f64))
            .chain((0..10).map(|i| (0u8, 100.0 + i as f64)))
            .collect();
        assert_eq!(auc_from_scalar(&vals).unwrap(), 1.0);

        // Random instance matches the pairwise oracle.
        let mut rng = rng_for(8, "scalar", 0);
        let pos: Vec<f64> = (0..15).map(|_| rng.gen_range(0..8) as f64).collect();
        let neg: Vec<f64> = (0..15).map(|_| rng.gen_range(0..8) as f64).collect();
        let vals: Vec<(u8, f64)> = pos
            .iter()
            .map(|&v| (1u8, v))
            .chain(neg.iter().map(|&v| (0u8, v)))
            .collect();
        assert!(
            (auc_from_scalar(&vals).unwrap() - pairwise_auc(&pos, &neg)).abs() < 1e-12
        );
    }

    #[test]
    fn fp_count_examples() {
        assert_eq!(fp_count(14_945, 0.01), 150);
        assert_eq!(fp_count(5_250, 0.001), 6);
        assert_eq!(fp_count(1_000, 0.001), 1);
        assert_eq!(
            fp_counts(14_945, &[0.01, 0.001]),
            vec![(0.01, 150), (0.001, 15)]
        );
    }

    #[test]
    fn bootstrap_is_reproducible_and_degenerates_correctly() {
        let pos: Vec<f64> = (0..200).map(|i| 0.6 + (i % 40) as f64 / 100.0).collect();
        let neg: Vec<f64> = (0..200).map(|i| 0.0 + (i % 40) as f64 / 100.0).collect();
        let s = score_set(&pos, &neg);
        let a = bootstrap_ci(&s, BootstrapMetric::Auroc, 500, 0).unwrap();
        let b = bootstrap_ci(&s, BootstrapMetric::Auroc, 500, 0).unwrap();
        assert_eq!(a, b);

        // Perfect separation collapses the interval to [1, 1].
        let sep = score_set(&vec![0.9; 100], &vec![0.1; 100]);
        assert_eq!(
            bootstrap_ci(&sep, BootstrapMetric::Auroc, 500, 0).unwrap(),
            (1.0, 1.0)
        );
    }

    #[test]
    fn point_estimate_inside_its_ci() {
        for trial in 0..20u64 {
            let mut rng = rng_for(trial, "ci-cover", 0);
            let pos: Vec<f64> =
                (0..60).map(|_| rng.gen_range(0.3..1.0)).collect();
            let neg: Vec<f64> =
                (0..60).map(|_| rng.gen_range(0.0..0.7)).collect();
            let s = score_set(&pos, &neg);
            let point = auroc(&s).unwrap();
            let (lo, hi) =
                bootstrap_ci(&s, BootstrapMetric::Auroc, 400, trial).unwrap();
            assert!(lo <= point && point <= hi, "trial {trial}: {point} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn threshold_for_fpr_realizes_budget() {
        let clean: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let t = threshold_for_fpr(&clean, 0.01);
        let fps = clean.iter().filter(|&&s| s >= t).count();
        assert_eq!(fps, 10);
    }
}
