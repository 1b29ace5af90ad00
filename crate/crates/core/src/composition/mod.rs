//! Composition features: the rule-of-thirds saliency map and the MSER count.

mod mser;
mod saliency;
mod thirds;

pub use mser::{mser_count, mser_count_gray, MserParams};
pub use saliency::{spectral_residual_saliency, SaliencyMap, SR_SIGMA, SR_WORKING_SIZE};
pub use thirds::{thirds_boundaries, thirds_map, ThirdsMap, THIRDS_CELLS};
