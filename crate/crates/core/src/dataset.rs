// SPDX-License-Identifier: Apache-2.0

//! Clean/attacked/tampered dataset construction under a transform T,
//! stratified splits at the level of underlying images, and integrity
//! audits.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::image::{ImageBuffer, STANDARD_SIZE};
use crate::ops::{self, OperatorSpec, ALL_OPERATORS};
use crate::seeds::rng_for;
use crate::{imageio, Error, Result};

/// Manifest schema version.
pub const MANIFEST_VERSION: u32 = 1;

/// Dataset split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn dir_name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// One dataset image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageRecord {
    /// Opaque 16-hex-digit id; also the on-disk file stem.
    pub id: String,
    /// Corpus of origin.
    pub source: String,
    /// 0 = clean side, 1 = attacked side.
    pub label: u8,
    pub tampered: bool,
    /// Tamper operator for tampered records.
    pub operator: Option<OperatorSpec>,
    pub split: Split,
    /// Identifier of the underlying source image.
    pub origin_id: String,
}

/// Authoritative record of provenance, labels, splits, and operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    /// Name of the transform T whose detectability is under evaluation.
    pub transform_id: String,
    pub seed: u64,
    pub tamper_fraction: f64,
    pub records: Vec<ImageRecord>,
    /// origin_id -> full content hash of the pool file.
    pub pool_checksums: BTreeMap<String, String>,
    /// origin_id -> pool file path (for paired spectral analysis).
    pub pool_paths: BTreeMap<String, String>,
}

/// A pool image with its corpus tag.
#[derive(Debug, Clone)]
pub struct PoolEntry {
    pub path: PathBuf,
    pub source: String,
}

/// The image-to-image map whose forensic stealth is being evaluated.
pub trait Transform: Sync {
    fn apply(&self, img: &ImageBuffer) -> Result<ImageBuffer>;
}

impl<F> Transform for F
where
    F: Fn(&ImageBuffer) -> Result<ImageBuffer> + Sync,
{
    fn apply(&self, img: &ImageBuffer) -> Result<ImageBuffer> {
        self(img)
    }
}

/// Opaque id: 16 hex digits of sha256(origin hash, role, seed).
fn opaque_id(origin_hash: &str, role: &str, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(origin_hash.as_bytes());
    h.update(role.as_bytes());
    h.update(seed.to_le_bytes());
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Origin descriptor fed into [`plan`].
#[derive(Debug, Clone)]
pub struct OriginInfo {
    /// 16-hex prefix of the content hash.
    pub origin_id: String,
    /// Full content hash.
    pub checksum: String,
    pub source: String,
}

/// Pure record construction: halve each source into clean and
/// attack-reserved halves, then duplicate a fraction of each class as
/// tampered records, balanced across the ten operators round-robin.
pub fn plan(
    origins: &[OriginInfo],
    transform_id: &str,
    tamper_fraction: f64,
    seed: u64,
) -> Result<Vec<ImageRecord>> {
    if origins.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut by_source: BTreeMap<&str, Vec<&OriginInfo>> = BTreeMap::new();
    for o in origins {
        by_source.entry(&o.source).or_default().push(o);
    }

    let mut clean: Vec<&OriginInfo> = Vec::new();
    let mut attacked: Vec<&OriginInfo> = Vec::new();
    for (source, mut list) in by_source {
        list.sort_by(|a, b| a.origin_id.cmp(&b.origin_id));
        let mut rng = rng_for(seed, &format!("halve:{source}"), 0);
        list.shuffle(&mut rng);
        let n_clean = list.len().div_ceil(2);
        clean.extend(&list[..n_clean]);
        attacked.extend(&list[n_clean..]);
    }

    let mut records = Vec::new();
    for (label, class) in [(0u8, &clean), (1u8, &attacked)] {
        let role = if label == 0 { "clean" } else { "attacked" };
        for o in class.iter() {
            records.push(ImageRecord {
                id: opaque_id(&o.checksum, role, seed),
                source: o.source.clone(),
                label,
                tampered: false,
                operator: None,
                split: Split::Train,
                origin_id: o.origin_id.clone(),
            });
        }
        // Tampered duplicates, operator assigned round-robin before the
        // parameter is sampled.
        let n_tampered = (tamper_fraction * class.len() as f64).round() as usize;
        let mut pick: Vec<&&OriginInfo> = class.iter().collect();
        pick.shuffle(&mut rng_for(seed, &format!("tamper-select:{label}"), 0));
        for (k, o) in pick.into_iter().take(n_tampered).enumerate() {
            let id = ALL_OPERATORS[k % ALL_OPERATORS.len()];
            let op_seed: u64 =
                rng_for(seed, &format!("tamper-param:{label}"), k as u64).gen();
            let spec = ops::sample_parameter(id, op_seed);
            records.push(ImageRecord {
                id: opaque_id(&o.checksum, &format!("tampered_{role}:{k}"), seed),
                source: o.source.clone(),
                label,
                tampered: true,
                operator: Some(spec),
                split: Split::Train,
                origin_id: o.origin_id.clone(),
            });
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let _ = transform_id;
    Ok(records)
}

/// Hash pool files and build the manifest (splits still unassigned).
///
/// Content-identical pool files are the same underlying image and are
/// deduplicated, keeping the first occurrence.
pub fn build(
    pool: &[PoolEntry],
    transform_id: &str,
    tamper_fraction: f64,
    seed: u64,
) -> Result<DatasetManifest> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let hashed: Vec<(String, String, &PoolEntry)> = pool
        .par_iter()
        .map(|entry| {
            let data = std::fs::read(&entry.path)?;
            let digest = Sha256::digest(&data);
            let full: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            Ok((full[..16].to_string(), full, entry))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut seen = BTreeSet::new();
    let mut origins = Vec::new();
    let mut pool_checksums = BTreeMap::new();
    let mut pool_paths = BTreeMap::new();
    for (origin_id, checksum, entry) in hashed {
        if !seen.insert(origin_id.clone()) {
            continue;
        }
        pool_checksums.insert(origin_id.clone(), checksum.clone());
        pool_paths.insert(origin_id.clone(), entry.path.display().to_string());
        origins.push(OriginInfo { origin_id, checksum, source: entry.source.clone() });
    }

    let records = plan(&origins, transform_id, tamper_fraction, seed)?;
    Ok(DatasetManifest {
        version: MANIFEST_VERSION,
        transform_id: transform_id.to_string(),
        seed,
        tamper_fraction,
        records,
        pool_checksums,
        pool_paths,
    })
}

/// Assign 70/15/15-style splits at origin level, stratified jointly by
/// (label, source); every derived record follows its origin.
pub fn split(
    manifest: &DatasetManifest,
    proportions: (f64, f64, f64),
    seed: u64,
) -> Result<DatasetManifest> {
    let (pt, pv, ps) = proportions;
    if !(0.999..=1.001).contains(&(pt + pv + ps)) || pt < 0.0 || pv < 0.0 || ps < 0.0 {
        return Err(Error::DegenerateSplit(format!(
            "proportions {proportions:?} do not sum to 1"
        )));
    }

    // Strata over base records (one per origin).
    let mut strata: BTreeMap<(u8, String), Vec<String>> = BTreeMap::new();
    for r in manifest.records.iter().filter(|r| !r.tampered) {
        strata
            .entry((r.label, r.source.clone()))
            .or_default()
            .push(r.origin_id.clone());
    }

    let mut assignment: BTreeMap<String, Split> = BTreeMap::new();
    for ((label, source), mut origin_ids) in strata {
        origin_ids.sort();
        origin_ids.shuffle(&mut rng_for(seed, &format!("split:{label}:{source}"), 0));
        let n = origin_ids.len();
        let counts = largest_remainder(n, &[pt, pv, ps]);
        let mut idx = 0usize;
        for (split, count) in [Split::Train, Split::Val, Split::Test].iter().zip(counts) {
            for origin in &origin_ids[idx..idx + count] {
                assignment.insert(origin.clone(), *split);
            }
            idx += count;
        }
    }

    let mut out = manifest.clone();
    for r in out.records.iter_mut() {
        r.split = *assignment.get(&r.origin_id).ok_or_else(|| {
            Error::DegenerateSplit(format!("origin {} has no base record", r.origin_id))
        })?;
    }
    Ok(out)
}

/// Integer apportionment by largest remainder (ties favor earlier splits).
fn largest_remainder(n: usize, props: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = props.iter().map(|p| p * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut remaining = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..props.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for i in order {
        if remaining == 0 {
            break;
        }
        counts[i] += 1;
        remaining -= 1;
    }
    counts
}

/// On-disk location of a record under the dataset root.
pub fn record_rel_path(record: &ImageRecord) -> PathBuf {
    PathBuf::from(record.split.dir_name())
        .join(record.label.to_string())
        .join(format!("{}.png", record.id))
}

/// Find the record's file, trying the canonical extension first.
pub fn find_record_file(root: &Path, record: &ImageRecord) -> Result<PathBuf> {
    let base = root
        .join(record.split.dir_name())
        .join(record.label.to_string())
        .join(&record.id);
    for ext in ["png", "bmp", "jpg"] {
        let p = base.with_extension(ext);
        if p.exists() {
            return Ok(p);
        }
    }
    Err(Error::MissingFile(base.with_extension("png")))
}

/// Render every record to canonical PNG under `{split}/{label}/{id}.png`.
///
/// Attacked records pass through the transform; tampered records then get
/// their operator. Work is parallel per record; each output is
/// independent of worker count.
pub fn materialize(
    manifest: &DatasetManifest,
    transform: &dyn Transform,
    out_root: &Path,
) -> Result<()> {
    for split in [Split::Train, Split::Val, Split::Test] {
        for label in ["0", "1"] {
            std::fs::create_dir_all(out_root.join(split.dir_name()).join(label))?;
        }
    }
    manifest.records.par_iter().try_for_each(|record| {
        let pool_path = manifest.pool_paths.get(&record.origin_id).ok_or_else(|| {
            Error::MissingFile(PathBuf::from(format!("pool:{}", record.origin_id)))
        })?;
        let mut img = imageio::decode(Path::new(pool_path))?;
        img.expect_square(STANDARD_SIZE)?;
        if record.label == 1 {
            let transformed = transform.apply(&img)?;
            if !transformed.same_geometry(&img) {
                return Err(Error::TransformGeometryError(format!(
                    "{}x{} from {}x{}",
                    transformed.width(),
                    transformed.height(),
                    img.width(),
                    img.height()
                )));
            }
            img = transformed;
        }
        if let Some(spec) = &record.operator {
            img = ops::apply(&img, spec)?;
        }
        let bytes = imageio::encode_png_canonical(&img)?;
        std::fs::write(out_root.join(record_rel_path(record)), bytes)?;
        Ok(())
    })
}

/// Result of the integrity audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrityReport {
    /// Origins or ids appearing in more than one split (must be 0).
    pub cross_split_overlaps: usize,
    /// True when an id is non-opaque (reveals source, label, or split).
    pub filename_leakage: bool,
    /// Human-readable findings from the per-class container audit.
    pub metadata_findings: Vec<String>,
}

/// Manifest-only part of the audit (no file access).
pub fn audit_manifest(manifest: &DatasetManifest) -> (usize, bool) {
    let mut origin_splits: BTreeMap<&str, BTreeSet<Split>> = BTreeMap::new();
    let mut id_splits: BTreeMap<&str, BTreeSet<Split>> = BTreeMap::new();
    for r in &manifest.records {
        origin_splits.entry(&r.origin_id).or_default().insert(r.split);
        id_splits.entry(&r.id).or_default().insert(r.split);
    }
    let overlaps = origin_splits.values().filter(|s| s.len() > 1).count()
        + id_splits.values().filter(|s| s.len() > 1).count();

    let mut forbidden: Vec<String> = manifest
        .records
        .iter()
        .map(|r| r.source.to_lowercase())
        .collect();
    forbidden.extend(
        ["clean", "attacked", "tampered", "train", "val", "test"]
            .iter()
            .map(|s| s.to_string()),
    );
    let leakage = manifest.records.iter().any(|r| {
        let id = r.id.to_lowercase();
        id.len() != 16
            || !id.bytes().all(|b| b.is_ascii_hexdigit())
            || forbidden.iter().any(|f| !f.is_empty() && id.contains(f))
    });
    (overlaps, leakage)
}

/// Per-class container audit: flags any non-pixel field whose presence
/// rate differs between classes.
pub fn audit_files(manifest: &DatasetManifest, root: &Path) -> Result<Vec<String>> {
    let reports: Vec<(u8, imageio::ContainerReport)> = manifest
        .records
        .par_iter()
        .map(|r| Ok((r.label, imageio::audit(&find_record_file(root, r)?)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut class_n = [0usize; 2];
    let mut field_counts: BTreeMap<String, [usize; 2]> = BTreeMap::new();
    let mut profile_counts = [0usize; 2];
    for (label, report) in &reports {
        let l = *label as usize;
        class_n[l] += 1;
        let names: BTreeSet<&String> =
            report.ancillary_fields.iter().map(|(n, _)| n).collect();
        for name in names {
            field_counts.entry(name.clone()).or_default()[l] += 1;
        }
        profile_counts[l] += report.has_color_profile as usize;
    }

    let mut findings = Vec::new();
    let rate = |c: usize, n: usize| if n == 0 { 0.0 } else { c as f64 / n as f64 };
    for (name, counts) in &field_counts {
        let r0 = rate(counts[0], class_n[0]);
        let r1 = rate(counts[1], class_n[1]);
        if (r0 - r1).abs() > 1e-3 {
            findings.push(format!(
                "container field '{name}' correlates with label: \
                 {}/{} clean vs {}/{} attacked",
                counts[0], class_n[0], counts[1], class_n[1]
            ));
        }
    }
    let p0 = rate(profile_counts[0], class_n[0]);
    let p1 = rate(profile_counts[1], class_n[1]);
    if (p0 - p1).abs() > 1e-3 {
        findings.push(format!(
            "color profile presence correlates with label: \
             {}/{} clean vs {}/{} attacked",
            profile_counts[0], class_n[0], profile_counts[1], class_n[1]
        ));
    }
    Ok(findings)
}

/// Full integrity audit: split overlaps, id opacity, and the per-class
/// container audit.
pub fn audit_integrity(manifest: &DatasetManifest, root: &Path) -> Result<IntegrityReport> {
    let (cross_split_overlaps, filename_leakage) = audit_manifest(manifest);
    let metadata_findings = audit_files(manifest, root)?;
    Ok(IntegrityReport { cross_split_overlaps, filename_leakage, metadata_findings })
}

/// Exact on-disk byte sizes for the size-only baseline.
pub fn file_size_table(
    manifest: &DatasetManifest,
    root: &Path,
) -> Result<Vec<(String, u8, u64)>> {
    manifest
        .records
        .iter()
        .map(|r| {
            let path = find_record_file(root, r)?;
            let size = std::fs::metadata(&path)?.len();
            Ok((r.id.clone(), r.label, size))
        })
        .collect()
}

/// Write the manifest as versioned JSON.
pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let json = serde_json::to_vec_pretty(manifest)?;
    std::fs::write(path, json)?;
    Ok(())
}

/// Load a manifest written by [`save_manifest`].
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let data = std::fs::read(path)?;
    let manifest: DatasetManifest = serde_json::from_slice(&data)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_origins(n: usize, source: &str) -> Vec<OriginInfo> {
        (0..n)
            .map(|i| {
                let checksum: String = {
                    let digest = Sha256::digest(format!("{source}:{i}").as_bytes());
                    digest.iter().map(|b| format!("{b:02x}")).collect()
                };
                OriginInfo {
                    origin_id: checksum[..16].to_string(),
                    checksum,
                    source: source.to_string(),
                }
            })
            .collect()
    }

    #[test]
    fn plan_counts_match_construction() {
        let origins = synthetic_origins(100, "pool");
        let records = plan(&origins, "identity", 0.2, 7).unwrap();
        let count = |label, tampered| {
            records
                .iter()
                .filter(|r| r.label == label && r.tampered == tampered)
                .count()
        };
        assert_eq!(count(0, false), 50);
        assert_eq!(count(1, false), 50);
        assert_eq!(count(0, true), 10);
        assert_eq!(count(1, true), 10);
        assert_eq!(records.len(), 120);
    }

    #[test]
    fn classes_are_origin_disjoint() {
        let origins = synthetic_origins(101, "pool");
        let records = plan(&origins, "t", 0.5, 3).unwrap();
        let cleans: BTreeSet<_> = records
            .iter()
            .filter(|r| r.label == 0)
            .map(|r| r.origin_id.clone())
            .collect();
        let attacked: BTreeSet<_> = records
            .iter()
            .filter(|r| r.label == 1)
            .map(|r| r.origin_id.clone())
            .collect();
        assert!(cleans.is_disjoint(&attacked));
        // Odd pool: clean gets the extra origin.
        assert_eq!(cleans.len(), 51);
        assert_eq!(attacked.len(), 50);
    }

    #[test]
    fn paper_scale_counts() {
        // Five-source composition at full scale; fraction chosen to yield
        // 20,000 tampered per class.
        let mut origins = Vec::new();
        for (source, n) in [
            ("u512", 72_102usize),
            ("abstractart", 8_146),
            ("artmix", 17_022),
            ("caltech256", 30_720),
            ("prcgen", 29_994),
        ] {
            origins.extend(synthetic_origins(n, source));
        }
        assert_eq!(origins.len(), 157_984);
        let records = plan(&origins, "t", 20_000.0 / 78_992.0, 0).unwrap();
        assert_eq!(records.len(), 197_984);
        let tampered_per_class = |label| {
            records
                .iter()
                .filter(|r| r.label == label && r.tampered)
                .count()
        };
        assert_eq!(tampered_per_class(0), 20_000);
        assert_eq!(tampered_per_class(1), 20_000);
    }

    #[test]
    fn tampered_records_are_operator_balanced() {
        let origins = synthetic_origins(400, "pool");
        let records = plan(&origins, "t", 1.0, 11).unwrap();
        for label in [0u8, 1] {
            let mut counts: BTreeMap<_, usize> = BTreeMap::new();
            for r in records.iter().filter(|r| r.label == label && r.tampered) {
                *counts.entry(r.operator.unwrap().id).or_default() += 1;
            }
            assert_eq!(counts.len(), 10);
            for (_, c) in counts {
                assert_eq!(c, 20);
            }
        }
        // Every operator parameter must come from the sampling table.
        for r in records.iter().filter(|r| r.tampered) {
            let spec = r.operator.unwrap();
            assert!(spec.id.parameter_set().contains(&spec.parameter));
        }
    }

    #[test]
    fn ids_are_unique_and_plan_is_deterministic() {
        let origins = synthetic_origins(300, "pool");
        let a = plan(&origins, "t", 0.3, 5).unwrap();
        let b = plan(&origins, "t", 0.3, 5).unwrap();
        assert_eq!(
            a.iter().map(|r| &r.id).collect::<Vec<_>>(),
            b.iter().map(|r| &r.id).collect::<Vec<_>>()
        );
        let ids: BTreeSet<_> = a.iter().map(|r| r.id.clone()).collect();
        assert_eq!(ids.len(), a.len());
    }

    #[test]
    fn empty_pool_is_rejected() {
        assert!(matches!(plan(&[], "t", 0.0, 0), Err(Error::EmptyPool)));
    }

    fn manifest_from(records: Vec<ImageRecord>) -> DatasetManifest {
        DatasetManifest {
            version: MANIFEST_VERSION,
            transform_id: "t".into(),
            seed: 0,
            tamper_fraction: 0.0,
            records,
            pool_checksums: BTreeMap::new(),
            pool_paths: BTreeMap::new(),
        }
    }

    #[test]
    fn split_sizes_and_determinism() {
        let origins = synthetic_origins(1000, "pool");
        let manifest = manifest_from(plan(&origins, "t", 0.0, 1).unwrap());
        let s1 = split(&manifest, (0.70, 0.15, 0.15), 9).unwrap();
        let s2 = split(&manifest, (0.70, 0.15, 0.15), 9).unwrap();
        let count = |m: &DatasetManifest, s: Split| {
            m.records.iter().filter(|r| r.split == s).count()
        };
        for s in [Split::Train, Split::Val, Split::Test] {
            assert_eq!(count(&s1, s), count(&s2, s));
        }
        assert!((count(&s1, Split::Train) as i64 - 700).abs() <= 1);
        assert!((count(&s1, Split::Val) as i64 - 150).abs() <= 1);
        assert!((count(&s1, Split::Test) as i64 - 150).abs() <= 1);
    }

    #[test]
    fn split_is_source_stratified() {
        let mut origins = synthetic_origins(800, "big");
        origins.extend(synthetic_origins(200, "small"));
        let manifest = manifest_from(plan(&origins, "t", 0.0, 2).unwrap());
        let s = split(&manifest, (0.70, 0.15, 0.15), 4).unwrap();
        for sp in [Split::Train, Split::Val, Split::Test] {
            let in_split: Vec<_> =
                s.records.iter().filter(|r| r.split == sp).collect();
            let small =
                in_split.iter().filter(|r| r.source == "small").count() as f64;
            let ratio = small / in_split.len() as f64;
            assert!((ratio - 0.2).abs() < 0.02, "{sp:?}: {ratio}");
        }
    }

    #[test]
    fn tampered_follow_their_origin() {
        let origins = synthetic_origins(200, "pool");
        let manifest = manifest_from(plan(&origins, "t", 0.5, 3).unwrap());
        let s = split(&manifest, (0.70, 0.15, 0.15), 8).unwrap();
        let mut by_origin: BTreeMap<&str, BTreeSet<Split>> = BTreeMap::new();
        for r in &s.records {
            by_origin.entry(&r.origin_id).or_default().insert(r.split);
        }
        assert!(by_origin.values().all(|set| set.len() == 1));
        let (overlaps, leakage) = audit_manifest(&s);
        assert_eq!(overlaps, 0);
        assert!(!leakage);
    }

    #[test]
    fn planted_cross_split_duplicate_is_counted() {
        let origins = synthetic_origins(50, "pool");
        let manifest = manifest_from(plan(&origins, "t", 0.0, 3).unwrap());
        let mut s = split(&manifest, (0.70, 0.15, 0.15), 8).unwrap();
        // Duplicate one record into a different split.
        let mut dup = s.records[0].clone();
        dup.split = if dup.split == Split::Train { Split::Test } else { Split::Train };
        s.records.push(dup);
        let (overlaps, _) = audit_manifest(&s);
        // Both the origin and the id now straddle two splits.
        assert_eq!(overlaps, 2);
    }

    #[test]
    fn largest_remainder_is_exact() {
        assert_eq!(largest_remainder(1000, &[0.7, 0.15, 0.15]), vec![700, 150, 150]);
        assert_eq!(largest_remainder(7, &[0.7, 0.15, 0.15]), vec![5, 1, 1]);
        assert_eq!(
            largest_remainder(3, &[0.7, 0.15, 0.15])
                .iter()
                .sum::<usize>(),
            3
        );
    }
}
