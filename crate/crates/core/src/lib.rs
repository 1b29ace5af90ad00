//! Hand-crafted image quality features for listing photos, hashed text
//! features for titles and tags, and a logistic-regression harness that
//! compares text-only, image-only and multimodal popularity models by AUC.
//!
//! The quality vector has 5158 dimensions laid out by [`assembly::schema`]:
//!
//! | name | dims |
//! |------|------|
//! | `Ke06-qa` spatial edge distribution | 1 |
//! | `Ke06-qh` hue count | 1 |
//! | `Ke06-qf` frequency blur | 1 |
//! | `Ke06-tong` edge-structure blur | 1 |
//! | `Ke06-qct` contrast | 1 |
//! | `Ke06-qb` brightness | 1 |
//! | `mser-count` | 1 |
//! | `Mai11-thirds map` | 25 |
//! | `Wang15-f1` average lightness | 1 |
//! | `Wang15-f14` wavelet smoothness | 1 |
//! | `Wang15-f18` laplacian smoothness | 1 |
//! | `Wang15-f21` wavelet low depth of field | 1 |
//! | `Wang15-f22` laplacian low depth of field | 1 |
//! | `Wang15-f26` spatial spread of detail | 1 |
//! | `Khosla14-texture` LBP pyramid | 5120 |
//!
//! Every extractor is a pure function of its input raster, so images can be
//! processed on any number of threads and still give bit-identical output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod blur;
pub mod composition;
pub mod dataset;
mod error;
pub mod imgcore;
pub mod model;
pub mod simplicity;
pub mod textfeat;
pub mod texture_dof;
pub mod visual;

pub use assembly::{extract_quality, ExtractConfig, QualityVector, QUALITY_DIM};
pub use error::{Error, Result};
pub use imgcore::{ColorSpace, Plane, RasterImage};
