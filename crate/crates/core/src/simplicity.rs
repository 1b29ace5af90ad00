//! Simplicity measures: spatial edge distribution, hue count, contrast and
//! average brightness.

use crate::imgcore::{
    hsv_from_rgb, lab_from_rgb, laplacian_3x3, minimal_mass_window, resize_plane, Histogram, RasterImage,
};
use crate::{Error, Result};

/// Side of the square the Laplacian response is resampled to.
pub const EDGE_GRID: usize = 100;
/// Share of edge or histogram mass the central window must hold.
pub const CENTRAL_MASS: f64 = 0.98;
pub const HUE_BINS: usize = 20;
pub const DEFAULT_HUE_ALPHA: f64 = 0.05;

/// Edge mass projected onto the x and y axes of the 100×100 grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProjection {
    /// Column masses, summing to 1.
    pub px: Vec<f64>,
    /// Row masses, summing to 1.
    pub py: Vec<f64>,
    /// Width in columns of the smallest window holding 98% of `px`.
    pub wx: usize,
    pub wy: usize,
}

impl EdgeProjection {
    pub fn from_masses(px: Vec<f64>, py: Vec<f64>) -> Option<Self> {
        let wx = minimal_mass_window(&px, CENTRAL_MASS)?.width;
        let wy = minimal_mass_window(&py, CENTRAL_MASS)?.width;
        Some(EdgeProjection { px, py, wx, wy })
    }

    /// Area fraction outside the central edge window, `1 − wx·wy / 100²`.
    pub fn outside_area(&self) -> f64 {
        1.0 - (self.wx * self.wy) as f64 / (self.px.len() * self.py.len()) as f64
    }
}

/// Projects the absolute Laplacian of `img` onto both axes. `None` when the
/// image has no edges at all.
pub fn edge_projection(img: &RasterImage) -> Result<Option<EdgeProjection>> {
    img.require_rgb()?;
    let lap = laplacian_3x3(img)?;
    let grid = resize_plane(&lap, EDGE_GRID, EDGE_GRID);
    let total = grid.sum();
    if !(total > 0.0) {
        return Ok(None);
    }
    let mut px = vec![0.0; EDGE_GRID];
    let mut py = vec![0.0; EDGE_GRID];
    for (y, row) in grid.data().chunks(EDGE_GRID).enumerate() {
        for (x, v) in row.iter().enumerate() {
            let m = v / total;
            px[x] += m;
            py[y] += m;
        }
    }
    Ok(EdgeProjection::from_masses(px, py))
}

/// Share of the image area lying outside the window that holds 98% of the
/// edge mass, in `[0, 1]`. Compact subjects score high. Edgeless images
/// score 0.
pub fn spatial_edge_distribution(img: &RasterImage) -> Result<f64> {
    Ok(edge_projection(img)?.map_or(0.0, |p| p.outside_area()))
}

/// As [`spatial_edge_distribution`], but an edgeless image is an error.
pub fn spatial_edge_distribution_strict(img: &RasterImage) -> Result<f64> {
    edge_projection(img)?
        .map(|p| p.outside_area())
        .ok_or(Error::DegenerateImage("laplacian response is identically zero"))
}

/// Hue histogram over pixels with V in `[0.15, 0.95]` and S > 0.2.
pub fn hue_histogram(img: &RasterImage) -> Result<Histogram> {
    img.require_rgb()?;
    let hues = img.data().chunks_exact(3).filter_map(|p| {
        let [h, s, v] = hsv_from_rgb([p[0], p[1], p[2]]);
        ((0.15..=0.95).contains(&v) && s > 0.2).then_some(h)
    });
    Ok(Histogram::from_samples(hues, HUE_BINS, 0.0, 360.0))
}

/// `20 − |{i : H(i) > α·max H}|`, in `[0, 20]`. An image with no pixel
/// surviving the saturation/value filter scores 20.
pub fn hue_count(img: &RasterImage, alpha: f64) -> Result<f64> {
    let hist = hue_histogram(img)?;
    let m = hist.max();
    if m == 0.0 {
        return Ok(HUE_BINS as f64);
    }
    let occupied = hist.bins().iter().filter(|&&b| b > alpha * m).count();
    Ok((HUE_BINS - occupied) as f64)
}

/// Sum of the three 256-level channel histograms, normalized.
pub fn level_histogram(img: &RasterImage) -> Result<Histogram> {
    img.require_rgb()?;
    let mut bins = vec![0.0; 256];
    for &v in img.data() {
        bins[(v * 255.0).round() as usize] += 1.0;
    }
    Ok(Histogram::from_bins(bins, 0.0, 256.0).normalize())
}

/// Width of the smallest level window holding 98% of the summed RGB
/// histogram, as a fraction of 256 levels.
pub fn contrast(img: &RasterImage) -> Result<f64> {
    let hist = level_histogram(img)?;
    let window = minimal_mass_window(hist.bins(), CENTRAL_MASS).expect("non-empty image has mass");
    Ok(window.width as f64 / 256.0)
}

/// Mean Lab lightness in `[0, 100]`.
pub fn brightness(img: &RasterImage) -> Result<f64> {
    img.require_rgb()?;
    let sum: f64 = img
        .data()
        .chunks_exact(3)
        .map(|p| lab_from_rgb([p[0], p[1], p[2]])[0])
        .sum();
    Ok(sum / (img.width() * img.height()) as f64)
}
