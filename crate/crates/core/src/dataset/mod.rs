//! Listing manifests, popularity labels, stratified splits and the synthetic corpus generator.

mod synth;

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use synth::{
    generate_synthetic, generate_synthetic_with, render_listing_image, SynthConfig, SyntheticCorpus,
    SyntheticListing, PREMIUM_TOKENS,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListingRecord {
    pub listing_id: u64,
    pub image_path: String,
    pub title: String,
    pub tags: Vec<String>,
    pub favorites: u64,
    pub clicks: u64,
    pub purchases: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub listing_id: u64,
    pub popularity: u64,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinarizePolicy {
    #[default]
    Median,
    Positive,
}

impl std::str::FromStr for BinarizePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(BinarizePolicy::Median),
            "positive" => Ok(BinarizePolicy::Positive),
            other => Err(Error::InvalidParameter(format!("unknown binarize policy {other:?}"))),
        }
    }
}

pub fn popularity_score(r: &ListingRecord) -> u64 {
    r.favorites + r.clicks + r.purchases
}

pub fn median(scores: &[u64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0
    })
}

/// Label 1 iff the score is strictly above the threshold the policy selects.
pub fn binarize(scores: &[u64], policy: BinarizePolicy) -> Result<Vec<u8>> {
    let threshold = match policy {
        BinarizePolicy::Median => median(scores)?,
        BinarizePolicy::Positive if scores.is_empty() => return Err(Error::EmptyInput),
        BinarizePolicy::Positive => 0.0,
    };
    Ok(scores.iter().map(|&s| u8::from(s as f64 > threshold)).collect())
}

pub fn label_records(records: &[ListingRecord], policy: BinarizePolicy) -> Result<Vec<LabeledExample>> {
    let scores: Vec<u64> = records.iter().map(popularity_score).collect();
    let labels = binarize(&scores, policy)?;
    Ok(records
        .iter()
        .zip(scores.iter().zip(labels))
        .map(|(r, (&popularity, label))| LabeledExample {
            listing_id: r.listing_id,
            popularity,
            label,
        })
        .collect())
}

/// Stratified, seeded split of positions `0..labels.len()`. Both returned
/// index lists are ascending; each class contributes at least one example to
/// each side.
pub fn split_indices(labels: &[u8], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidParameter(format!("label {bad} is not binary")));
    }
    let mut classes: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        classes[l as usize].push(i);
    }
    for (label, members) in classes.iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::InsufficientClassMembers {
                label: label as u8,
                count: members.len(),
            });
        }
    }

    // Largest-remainder allocation keeps the total at round(fraction * n).
    let total = (test_fraction * labels.len() as f64).round() as usize;
    let quotas: Vec<f64> = classes.iter().map(|c| test_fraction * c.len() as f64).collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())));
    for &c in order.iter().take(total.saturating_sub(take[0] + take[1])) {
        take[c] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (members, k) in classes.iter_mut().zip(take) {
        members.shuffle(&mut rng);
        let k = k.clamp(1, members.len() - 1);
        test.extend_from_slice(&members[..k]);
        train.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split(
    examples: &[LabeledExample],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledExample>, Vec<LabeledExample>)> {
    let labels: Vec<u8> = examples.iter().map(|e| e.label).collect();
    let (train, test) = split_indices(&labels, test_fraction, seed)?;
    Ok((
        train.into_iter().map(|i| examples[i]).collect(),
        test.into_iter().map(|i| examples[i]).collect(),
    ))
}

pub fn parse_manifest<R: BufRead>(input: R) -> Result<Vec<ListingRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ListingRecord = serde_json::from_str(&line).map_err(|e| Error::Manifest {
            line: k + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(record.listing_id) {
            return Err(Error::DuplicateId(record.listing_id));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ListingRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::at_path(path, e))?;
    parse_manifest(BufReader::new(file))
}

pub fn write_manifest_to<W: Write>(mut out: W, records: &[ListingRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_manifest(records: &[ListingRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::at_path(path, e))?;
    write_manifest_to(BufWriter::new(file), records)
}

/// Relative image paths are taken relative to the manifest's directory.
pub fn resolve_image_path(manifest_path: impl AsRef<Path>, record: &ListingRecord) -> PathBuf {
    let image = Path::new(&record.image_path);
    if image.is_absolute() {
        return image.to_path_buf();
    }
    manifest_path
        .as_ref()
        .parent()
        .map(|dir| dir.join(image))
        .unwrap_or_else(|| image.to_path_buf())
}
