//! Intermediate maps rendered as grayscale images for inspection.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::assembly::{extract_quality_with, ExtractConfig, QualityVector};
use crate::composition::{spectral_residual_saliency, thirds_map, THIRDS_CELLS};
use crate::imgcore::{haar_forward, laplacian_3x3, save_png};
use crate::texture_dof::lbp_image;
use crate::{Error, Plane, RasterImage, Result};

/// Pixels per thirds-map cell in the rendered grid.
pub const THIRDS_CELL_PX: usize = 40;

/// Scales by the maximum absolute value; an all-zero plane stays black.
pub fn normalize_abs(p: &Plane) -> Plane {
    let peak = p.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Plane::zeros(p.width(), p.height());
    }
    p.map(|v| v.abs() / peak)
}

/// Each of the 5x5 cells becomes a `THIRDS_CELL_PX` square block.
pub fn thirds_grid_plane(values: &[f64; THIRDS_CELLS]) -> Plane {
    let side = 5 * THIRDS_CELL_PX;
    Plane::from_fn(side, side, |x, y| values[(y / THIRDS_CELL_PX) * 5 + x / THIRDS_CELL_PX])
}

pub fn lbp_plane(img: &RasterImage) -> Plane {
    let gray = img.to_gray();
    let codes = lbp_image(&gray);
    Plane::from_fn(gray.width(), gray.height(), |x, y| {
        codes[y * gray.width() + x].map_or(0.0, |c| f64::from(c) / 255.0)
    })
}

/// Named maps in output order, each with values in `[0,1]`.
pub fn feature_maps(img: &RasterImage) -> Result<Vec<(&'static str, Plane)>> {
    let laplacian = normalize_abs(&laplacian_3x3(img)?);
    let saliency = spectral_residual_saliency(img)?;
    let thirds = thirds_grid_plane(thirds_map(&saliency).values());
    let haar = haar_forward(&img.to_gray());
    Ok(vec![
        ("laplacian", laplacian),
        ("saliency", saliency.plane().clone()),
        ("thirds_map", thirds),
        ("lbp", lbp_plane(img)),
        ("wavelet_hl", normalize_abs(&haar.hl)),
        ("wavelet_lh", normalize_abs(&haar.lh)),
        ("wavelet_hh", normalize_abs(&haar.hh)),
    ])
}

/// Scalar features plus the thirds map, keyed by schema name.
pub fn features_json(q: &QualityVector) -> Value {
    let mut map: BTreeMap<String, Value> = q.scalars().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    if let Some(block) = q.block("Mai11-thirds map") {
        map.insert("Mai11-thirds map".to_string(), json!(block));
    }
    json!(map)
}

/// Writes the seven map PNGs and `features.json`; returns the written paths.
pub fn write_visualization(img: &RasterImage, out_dir: impl AsRef<Path>, config: &ExtractConfig) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::at_path(out_dir, e))?;
    let quality = extract_quality_with(img, config)?;
    let mut written = Vec::with_capacity(8);
    for (name, plane) in feature_maps(img)? {
        let path = out_dir.join(format!("{name}.png"));
        save_png(&RasterImage::from_gray_plane(&plane), &path)?;
        written.push(path);
    }
    let path = out_dir.join("features.json");
    let text = serde_json::to_string_pretty(&features_json(&quality))?;
    fs::write(&path, text).map_err(|e| Error::at_path(&path, e))?;
    written.push(path);
    Ok(written)
}
