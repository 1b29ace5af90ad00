use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accuracy, auc, relative_lift, LogisticModel, TrainConfig};
use crate::assembly::{extract_quality_with, ExtractConfig, QualityVector, QUALITY_DIM};
use crate::dataset::{label_records, read_manifest, resolve_image_path, split_indices, BinarizePolicy, ListingRecord};
use crate::imgcore::load_image;
use crate::textfeat::{concat_mm, text_vector, SparseVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Text,
    Image,
    Mm,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::Text, Modality::Image, Modality::Mm];

    pub fn name(self) -> &'static str {
        match self {
            Modality::Text => "text",
            Modality::Image => "image",
            Modality::Mm => "mm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub policy: BinarizePolicy,
    pub test_fraction: f64,
    /// Seeds both the split and every model's batch order.
    pub seed: u64,
    pub train: TrainConfig,
    pub extract: ExtractConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            policy: BinarizePolicy::Median,
            test_fraction: 0.2,
            seed: 3,
            train: TrainConfig::default(),
            extract: ExtractConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub auc_text: f64,
    pub auc_image: f64,
    pub auc_mm: f64,
    pub lift_image_pct: f64,
    pub lift_mm_pct: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    pub acc_text: f64,
    pub acc_image: f64,
    pub acc_mm: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: EvalReport,
    /// Text, image and multimodal models, in that order.
    pub models: Vec<(Modality, LogisticModel)>,
}

/// Extracts quality vectors for every record in parallel; results keep manifest order.
pub fn extract_manifest(
    manifest_path: impl AsRef<Path>,
    records: &[ListingRecord],
    config: &ExtractConfig,
) -> Vec<Result<QualityVector>> {
    let manifest_path = manifest_path.as_ref();
    records
        .par_iter()
        .map(|r| {
            let img = load_image(resolve_image_path(manifest_path, r))?;
            extract_quality_with(&img, config)
        })
        .collect()
}

pub fn run_experiment(manifest_path: impl AsRef<Path>, config: &ExperimentConfig) -> Result<EvalReport> {
    let manifest_path = manifest_path.as_ref();
    let records = read_manifest(manifest_path)?;
    let qualities = extract_manifest(manifest_path, &records, &config.extract)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(run_experiment_on(&records, &qualities, config)?.report)
}

/// Trains the three models on one shared split of pre-extracted vectors.
pub fn run_experiment_on(
    records: &[ListingRecord],
    qualities: &[QualityVector],
    config: &ExperimentConfig,
) -> Result<ExperimentOutput> {
    if records.len() != qualities.len() {
        return Err(Error::DimensionMismatch {
            expected: records.len(),
            got: qualities.len(),
        });
    }
    let labels: Vec<u8> = label_records(records, config.policy)?
        .iter()
        .map(|e| e.label)
        .collect();
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(Error::DegenerateLabels);
    }
    let (train_idx, test_idx) = split_indices(&labels, config.test_fraction, config.seed)?;

    let texts: Vec<SparseVector> = records.iter().map(|r| text_vector(&r.title, &r.tags)).collect();
    let train_config = TrainConfig {
        seed: config.seed,
        ..config.train
    };

    let mut models = Vec::with_capacity(3);
    let mut aucs = [0.0; 3];
    let mut accs = [0.0; 3];
    for (k, modality) in Modality::ALL.into_iter().enumerate() {
        let xs: Vec<SparseVector> = match modality {
            Modality::Text => texts.clone(),
            Modality::Image => qualities
                .iter()
                .map(|q| SparseVector::from_dense(q.values()))
                .collect::<Result<_>>()?,
            Modality::Mm => qualities.iter().zip(&texts).map(|(q, t)| concat_mm(q, t)).collect(),
        };
        let dense_block = if modality == Modality::Text { 0 } else { QUALITY_DIM };
        let pick = |idx: &[usize]| -> (Vec<SparseVector>, Vec<u8>) {
            (idx.iter().map(|&i| xs[i].clone()).collect(), idx.iter().map(|&i| labels[i]).collect())
        };
        let (x_train, y_train) = pick(&train_idx);
        let (x_test, y_test) = pick(&test_idx);

        log::info!("training {} model on {} examples", modality.name(), x_train.len());
        let model = LogisticModel::train(&x_train, &y_train, dense_block, &train_config)?;
        let probs = x_test
            .iter()
            .map(|x| model.predict_proba(x))
            .collect::<Result<Vec<_>>>()?;
        aucs[k] = auc(&probs, &y_test)?;
        accs[k] = accuracy(&probs, &y_test);
        models.push((modality, model));
    }

    let report = EvalReport {
        auc_text: aucs[0],
        auc_image: aucs[1],
        auc_mm: aucs[2],
        lift_image_pct: relative_lift(aucs[1], aucs[0]),
        lift_mm_pct: relative_lift(aucs[2], aucs[0]),
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        seed: config.seed,
        acc_text: accs[0],
        acc_image: accs[1],
        acc_mm: accs[2],
    };
    Ok(ExperimentOutput { report, models })
}
