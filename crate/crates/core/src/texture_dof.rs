//! Texture (wavelet and Laplacian smoothness, LBP spatial pyramid) and
//! depth-of-field features (center detail ratios, spatial spread of detail).
//!
//! All of them work on the Lab lightness channel except the LBP pyramid,
//! which uses Rec. 601 luma.

use crate::imgcore::{
    build_laplacian_pyramid, build_wavelet_pyramid, lab_from_rgb, HaarLevel, Plane, RasterImage,
};
use crate::Result;

pub const LBP_BINS: usize = 256;
/// 2×2 cells followed by 4×4 cells.
pub const LBP_CELLS: usize = 4 + 16;
pub const LBP_DIM: usize = LBP_CELLS * LBP_BINS;

const PYRAMID_LEVELS: usize = 3;

/// How band-pass coefficients are turned into detail power. The wavelet
/// features always square; the Laplacian features square by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetailMode {
    #[default]
    Squared,
    Absolute,
}

impl DetailMode {
    #[inline]
    fn apply(self, v: f64) -> f64 {
        match self {
            DetailMode::Squared => v * v,
            DetailMode::Absolute => v.abs(),
        }
    }
}

/// Half-open pixel rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRect {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

impl CellRect {
    pub fn area(&self) -> usize {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..self.x1).contains(&x) && (self.y0..self.y1).contains(&y)
    }
}

/// Boundaries splitting `len` into `parts` near-equal runs, rounding the
/// cumulative fractions half up.
pub fn grid_boundaries(len: usize, parts: usize) -> Vec<usize> {
    (0..=parts).map(|i| (2 * len * i + parts) / (2 * parts)).collect()
}

/// Row-major `parts × parts` grid tiling a `width × height` plane.
pub fn grid_cells(width: usize, height: usize, parts: usize) -> Vec<CellRect> {
    let xs = grid_boundaries(width, parts);
    let ys = grid_boundaries(height, parts);
    let mut cells = Vec::with_capacity(parts * parts);
    for r in 0..parts {
        for c in 0..parts {
            cells.push(CellRect {
                x0: xs[c],
                x1: xs[c + 1],
                y0: ys[r],
                y1: ys[r + 1],
            });
        }
    }
    cells
}

/// Indices of the four central cells of a 4×4 grid (M6, M7, M10, M11 counting from 1).
pub const CENTER_CELLS: [usize; 4] = [5, 6, 9, 10];

pub fn lab_lightness(img: &RasterImage) -> Result<Plane> {
    img.require_rgb()?;
    let data = img
        .data()
        .chunks_exact(3)
        .map(|p| lab_from_rgb([p[0], p[1], p[2]])[0])
        .collect();
    Plane::new(img.width(), img.height(), data)
}

fn wavelet_detail_power(level: &HaarLevel) -> Plane {
    let [hl, lh, hh] = level.subbands();
    Plane::from_fn(hl.width(), hl.height(), |x, y| {
        hl.get(x, y).powi(2) + lh.get(x, y).powi(2) + hh.get(x, y).powi(2)
    })
}

fn finest_haar(img: &RasterImage, min: usize) -> Result<HaarLevel> {
    img.ensure_min_size(min)?;
    let pyramid = build_wavelet_pyramid(&lab_lightness(img)?, PYRAMID_LEVELS)?;
    Ok(pyramid.finest().clone())
}

fn laplacian_band(img: &RasterImage, level: usize, min: usize) -> Result<Plane> {
    img.ensure_min_size(min)?;
    let pyramid = build_laplacian_pyramid(&lab_lightness(img)?, PYRAMID_LEVELS)?;
    Ok(pyramid.band(level).clone())
}

/// Mean squared finest-scale Haar detail over the three subbands,
/// `Σ_b Σ w_b² / (3MN)` with `M×N` the subband size.
pub fn wavelet_smoothness(img: &RasterImage) -> Result<f64> {
    let level = finest_haar(img, 8)?;
    let power = wavelet_detail_power(&level);
    Ok(power.sum() / (3 * power.data().len()) as f64)
}

/// Mean detail power of the second-finest plane of a three-level Laplacian pyramid.
pub fn laplacian_smoothness(img: &RasterImage, mode: DetailMode) -> Result<f64> {
    let band = laplacian_band(img, 1, 16)?;
    let sum: f64 = band.data().iter().map(|&v| mode.apply(v)).sum();
    Ok(sum / band.data().len() as f64)
}

/// Share of detail mass falling in the four central cells of a 4×4 grid;
/// 0 when the plane has no mass.
pub fn center_detail_ratio(power: &Plane) -> f64 {
    let cells = grid_cells(power.width(), power.height(), 4);
    let mut per_cell = [0.0; 16];
    for (i, cell) in cells.iter().enumerate() {
        for y in cell.y0..cell.y1 {
            for x in cell.x0..cell.x1 {
                per_cell[i] += power.get(x, y);
            }
        }
    }
    let total: f64 = per_cell.iter().sum();
    if !(total > 0.0) {
        return 0.0;
    }
    CENTER_CELLS.iter().map(|&i| per_cell[i]).sum::<f64>() / total
}

/// Mass-weighted mean distance of detail from its center of mass, divided
/// by `MN`; 0 for a plane with no mass.
pub fn spatial_spread(power: &Plane) -> f64 {
    let total = power.sum();
    if !(total > 0.0) {
        return 0.0;
    }
    let (w, h) = (power.width(), power.height());
    let (mut row, mut col) = (0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            let m = power.get(x, y);
            row += m * y as f64;
            col += m * x as f64;
        }
    }
    let (c_row, c_col) = (row / total, col / total);
    let mut acc = 0.0;
    for y in 0..h {
        for x in 0..w {
            let m = power.get(x, y);
            if m != 0.0 {
                acc += m * ((y as f64 - c_row).powi(2) + (x as f64 - c_col).powi(2)).sqrt();
            }
        }
    }
    acc / (w * h) as f64
}

/// Central share of finest-scale Haar detail power on the lightness channel.
pub fn dof_wavelet(img: &RasterImage) -> Result<f64> {
    Ok(center_detail_ratio(&wavelet_detail_power(&finest_haar(img, 16)?)))
}

/// Central share of finest Laplacian-plane detail power on the lightness channel.
pub fn dof_laplacian(img: &RasterImage, mode: DetailMode) -> Result<f64> {
    let band = laplacian_band(img, 0, 16)?;
    Ok(center_detail_ratio(&band.map(|v| mode.apply(v))))
}

/// Spatial spread of finest Laplacian-plane detail power around its center of mass.
pub fn dof_spatial_spread(img: &RasterImage, mode: DetailMode) -> Result<f64> {
    let band = laplacian_band(img, 0, 16)?;
    Ok(spatial_spread(&band.map(|v| mode.apply(v))))
}

/// 8-neighbor radius-1 LBP code. Bit `k` is set when the k-th neighbor,
/// counting counter-clockwise from east, is at least the center value.
#[inline]
pub fn lbp_code(p: &Plane, x: usize, y: usize) -> u8 {
    const OFFSETS: [(isize, isize); 8] = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];
    let center = p.get(x, y);
    let mut code = 0u8;
    for (bit, (dx, dy)) in OFFSETS.iter().enumerate() {
        let n = p.get((x as isize + dx) as usize, (y as isize + dy) as usize);
        if n >= center {
            code |= 1 << bit;
        }
    }
    code
}

/// LBP codes of interior pixels; border pixels are reported as `None`.
pub fn lbp_image(gray: &Plane) -> Vec<Option<u8>> {
    let (w, h) = (gray.width(), gray.height());
    let mut out = vec![None; w * h];
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            out[y * w + x] = Some(lbp_code(gray, x, y));
        }
    }
    out
}

/// Concatenated per-cell LBP histograms: the 2×2 grid then the 4×4 grid,
/// cells row-major, 256 bins each, every non-empty cell L1-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct LbpPyramidHistogram(Vec<f64>);

impl LbpPyramidHistogram {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn cell(&self, index: usize) -> &[f64] {
        &self.0[index * LBP_BINS..(index + 1) * LBP_BINS]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub fn lbp_pyramid(img: &RasterImage) -> Result<LbpPyramidHistogram> {
    img.ensure_min_size(8)?;
    let gray = img.to_gray();
    let (w, h) = (gray.width(), gray.height());
    let codes = lbp_image(&gray);
    let cells: Vec<CellRect> = grid_cells(w, h, 2).into_iter().chain(grid_cells(w, h, 4)).collect();
    let mut out = vec![0.0; LBP_DIM];
    for (ci, cell) in cells.iter().enumerate() {
        let hist = &mut out[ci * LBP_BINS..(ci + 1) * LBP_BINS];
        let mut n = 0usize;
        for y in cell.y0..cell.y1 {
            for x in cell.x0..cell.x1 {
                if let Some(code) = codes[y * w + x] {
                    hist[code as usize] += 1.0;
                    n += 1;
                }
            }
        }
        if n > 0 {
            let n = n as f64;
            hist.iter_mut().for_each(|b| *b /= n);
        }
    }
    Ok(LbpPyramidHistogram(out))
}
