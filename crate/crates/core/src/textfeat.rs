//! Hashed bag-of-n-grams text features for listing titles and tags.

use std::hash::Hasher;

use fnv::FnvHasher;

use crate::assembly::{QualityVector, QUALITY_DIM};
use crate::{Error, Result};

pub const TEXT_DIM: usize = 1 << 18;
pub const MM_DIM: usize = QUALITY_DIM + TEXT_DIM;

/// Sparse vector with strictly increasing indices and finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn empty(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Validates ordering, bounds and finiteness.
    pub fn new(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        for (k, &(i, v)) in entries.iter().enumerate() {
            if i >= dim {
                return Err(Error::InvalidParameter(format!("index {i} out of range for dim {dim}")));
            }
            if k > 0 && entries[k - 1].0 >= i {
                return Err(Error::InvalidParameter("indices must be strictly increasing".into()));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("value at index {i} is not finite")));
            }
        }
        Ok(SparseVector { dim, entries })
    }

    /// Builds from unordered pairs, summing duplicates and dropping zeros.
    pub fn from_unsorted(dim: usize, mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|e| e.1 != 0.0);
        Self::new(dim, entries)
    }

    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect();
        Self::new(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Lowercases and splits on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// FNV-1a 64 of the UTF-8 bytes.
pub fn feature_hash(name: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(name.as_bytes());
    h.finish()
}

pub fn feature_index(name: &str) -> usize {
    (feature_hash(name) % TEXT_DIM as u64) as usize
}

/// Namespaced feature names, in generation order.
pub fn feature_names(title: &str, tags: &[String]) -> Vec<String> {
    let words = tokenize(title);
    let mut names: Vec<String> = words.iter().map(|w| format!("T1:{w}")).collect();
    names.extend(words.windows(2).map(|p| format!("T2:{}_{}", p[0], p[1])));
    for tag in tags {
        names.extend(tokenize(tag).into_iter().map(|w| format!("G1:{w}")));
    }
    names
}

pub fn text_vector(title: &str, tags: &[String]) -> SparseVector {
    let pairs = feature_names(title, tags)
        .iter()
        .map(|n| (feature_index(n), 1.0))
        .collect();
    SparseVector::from_unsorted(TEXT_DIM, pairs).expect("hashed indices are in range")
}

/// Quality block at `[0, 5158)`, text block shifted by 5158.
pub fn concat_mm(q: &QualityVector, t: &SparseVector) -> SparseVector {
    let mut entries: Vec<(usize, f64)> = q
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i, *v))
        .collect();
    entries.extend(t.entries().iter().map(|&(i, v)| (QUALITY_DIM + i, v)));
    SparseVector::new(QUALITY_DIM + t.dim(), entries).expect("blocks are disjoint and ordered")
}
