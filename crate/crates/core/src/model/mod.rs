//! Logistic regression, AUC and the text / image / multimodal comparison.

mod auc;
mod experiment;
mod logistic;

pub use auc::{accuracy, auc, relative_lift};
pub use experiment::{
    extract_manifest, run_experiment, run_experiment_on, EvalReport, ExperimentConfig, ExperimentOutput,
    Modality,
};
pub use logistic::{loss_and_gradient, sigmoid, LogisticModel, Standardization, TrainConfig};
