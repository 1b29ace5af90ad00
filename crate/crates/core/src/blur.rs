//! Blur estimators.
//!
//! * Frequency blur: share of DFT coefficients whose magnitude exceeds a
//!   threshold Θ. Blurring removes high frequencies, so sharper images score
//!   higher.
//! * Edge-structure blur: a three-level Haar decomposition classifies each
//!   16×16 block as a Dirac/abrupt step or a gradual step/roof by how its
//!   maximal detail response evolves across scales. The score is the share
//!   of gradual edges whose finest-scale response fell below the edge
//!   threshold.

use crate::imgcore::{build_wavelet_pyramid, fft2_magnitude, Plane, RasterImage};
use crate::{Error, Result};

/// Θ multiplier applied to the mean non-DC spectral magnitude.
pub const DEFAULT_THETA_MULTIPLIER: f64 = 5.0;
/// Edge threshold on per-level mean-normalized Haar coefficients.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 35.0 / 255.0;

const WAVELET_LEVELS: usize = 3;
/// Pooling window per level; all three cover the same 16×16 pixel block.
const POOL: [usize; WAVELET_LEVELS] = [8, 4, 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlurConfig {
    pub theta_multiplier: f64,
    pub edge_threshold: f64,
}

impl Default for BlurConfig {
    fn default() -> Self {
        BlurConfig {
            theta_multiplier: DEFAULT_THETA_MULTIPLIER,
            edge_threshold: DEFAULT_EDGE_THRESHOLD,
        }
    }
}

fn gray_of(img: &RasterImage) -> Result<Plane> {
    match img.colorspace() {
        crate::ColorSpace::Rgb | crate::ColorSpace::Gray => Ok(img.to_gray()),
        other => Err(Error::InvalidRaster(format!("blur expects RGB or Gray, got {other:?}"))),
    }
}

/// Mean DFT magnitude over every frequency except DC. Zero for 1×1 planes.
pub fn mean_ac_magnitude(spectrum: &Plane) -> f64 {
    let n = spectrum.data().len();
    if n < 2 {
        return 0.0;
    }
    spectrum.data()[1..].iter().sum::<f64>() / (n - 1) as f64
}

/// Θ for `img`: `multiplier ×` its mean non-DC spectral magnitude.
pub fn relative_theta(img: &RasterImage, multiplier: f64) -> Result<f64> {
    Ok(multiplier * mean_ac_magnitude(&fft2_magnitude(&gray_of(img)?)))
}

fn count_above(spectrum: &Plane, theta: f64) -> f64 {
    let above = spectrum.data().iter().filter(|&&m| m > theta).count();
    above as f64 / spectrum.data().len() as f64
}

/// `|{(u,v) : |F(u,v)| > Θ}| / (M·N)` on the grayscale image, with an
/// absolute threshold.
pub fn blur_frequency(img: &RasterImage, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    Ok(count_above(&fft2_magnitude(&gray_of(img)?), theta))
}

/// [`blur_frequency`] with Θ taken relative to the image's own spectrum.
/// A spectrum with no energy outside DC scores `1/(M·N)` or 0.
pub fn blur_frequency_relative(img: &RasterImage, multiplier: f64) -> Result<f64> {
    if !(multiplier > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "theta multiplier must be positive, got {multiplier}"
        )));
    }
    let spectrum = fft2_magnitude(&gray_of(img)?);
    let theta = multiplier * mean_ac_magnitude(&spectrum);
    Ok(count_above(&spectrum, theta))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeStructureCounts {
    pub n_edges: usize,
    pub n_dirac_astep: usize,
    pub n_gstep_roof: usize,
    pub n_blurred_gstep_roof: usize,
}

impl EdgeStructureCounts {
    pub fn blur_ratio(&self) -> f64 {
        self.n_blurred_gstep_roof as f64 / self.n_gstep_roof.max(1) as f64
    }
}

/// Per-block maximum of `max(|HL|, |LH|, |HH|) / 2^level`, pooled over
/// `window × window` coefficient blocks.
fn pooled_edge_map(level: &crate::imgcore::HaarLevel, scale: f64, window: usize) -> Plane {
    let (w, h) = (level.hl.width(), level.hl.height());
    let (gw, gh) = (w.div_ceil(window), h.div_ceil(window));
    let mut out = Plane::zeros(gw, gh);
    for y in 0..h {
        for x in 0..w {
            let e = level
                .subbands()
                .iter()
                .map(|b| b.get(x, y).abs())
                .fold(0.0, f64::max)
                * scale;
            let (gx, gy) = (x / window, y / window);
            if e > out.get(gx, gy) {
                out.set(gx, gy, e);
            }
        }
    }
    out
}

pub fn edge_structure_counts(img: &RasterImage, threshold: f64) -> Result<EdgeStructureCounts> {
    img.ensure_min_size(1 << WAVELET_LEVELS)?;
    let pyramid = build_wavelet_pyramid(&gray_of(img)?, WAVELET_LEVELS)?;
    let maps: Vec<Plane> = pyramid
        .levels()
        .iter()
        .enumerate()
        .map(|(k, level)| pooled_edge_map(level, 0.5f64.powi(k as i32 + 1), POOL[k]))
        .collect();
    let (gw, gh) = (maps[0].width(), maps[0].height());
    debug_assert!(maps.iter().all(|m| m.width() == gw && m.height() == gh));

    let mut counts = EdgeStructureCounts::default();
    for y in 0..gh {
        for x in 0..gw {
            let (e1, e2, e3) = (maps[0].get(x, y), maps[1].get(x, y), maps[2].get(x, y));
            if !(e1 > threshold || e2 > threshold || e3 > threshold) {
                continue;
            }
            counts.n_edges += 1;
            if e1 > e2 && e2 > e3 {
                counts.n_dirac_astep += 1;
            } else if (e1 < e2 && e2 < e3) || (e2 > e1 && e2 > e3) {
                counts.n_gstep_roof += 1;
                if e1 < threshold {
                    counts.n_blurred_gstep_roof += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Share of gradual-step and roof edges that have lost their sharpness, in `[0, 1]`.
pub fn blur_edge_structure(img: &RasterImage, threshold: f64) -> Result<f64> {
    Ok(edge_structure_counts(img, threshold)?.blur_ratio())
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::imgcore::gaussian_blur;

    fn noise(w: usize, h: usize, seed: u64) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RasterImage::gray_rgb_from_fn(w, h, |_, _| rng.gen())
    }

    fn rotate_180(img: &RasterImage) -> RasterImage {
        let (w, h) = (img.width(), img.height());
        RasterImage::rgb_from_fn(w, h, |x, y| {
            let p = img.pixel(w - 1 - x, h - 1 - y);
            [p[0], p[1], p[2]]
        })
    }

    #[test]
    fn constant_image_has_only_dc() {
        let img = RasterImage::solid_rgb(16, 16, [0.5; 3]);
        assert!(blur_frequency(&img, 1e-6).unwrap() <= 1.0 / 256.0);
        assert!(blur_frequency_relative(&img, 5.0).unwrap() <= 1.0 / 256.0);
    }

    #[test]
    fn impulse_spectrum_is_flat() {
        let img = RasterImage::gray_rgb_from_fn(8, 8, |x, y| if (x, y) == (3, 4) { 1.0 } else { 0.0 });
        assert_eq!(blur_frequency(&img, 0.99).unwrap(), 1.0);
    }

    #[test]
    fn blurring_noise_lowers_frequency_score() {
        let img = noise(64, 64, 17);
        let theta = relative_theta(&img, 1.0).unwrap();
        let sharp = blur_frequency(&img, theta).unwrap();
        let blurred = blur_frequency(&gaussian_blur(&img, 2.0).unwrap(), theta).unwrap();
        assert!(sharp > blurred, "{sharp} vs {blurred}");
    }

    #[test]
    fn rejects_non_positive_theta() {
        let img = noise(8, 8, 1);
        assert!(blur_frequency(&img, 0.0).is_err());
        assert!(blur_frequency_relative(&img, -1.0).is_err());
    }

    #[test]
    fn step_edge_is_sharp_and_blurred_step_is_not() {
        let step = RasterImage::gray_rgb_from_fn(64, 64, |x, _| if x >= 29 { 0.9 } else { 0.1 });
        let sharp = edge_structure_counts(&step, DEFAULT_EDGE_THRESHOLD).unwrap();
        let sharp_ratio = sharp.blur_ratio();
        assert!(sharp_ratio < 0.05, "{sharp:?}");
        let soft = gaussian_blur(&step, 3.0).unwrap();
        let soft_ratio = blur_edge_structure(&soft, DEFAULT_EDGE_THRESHOLD).unwrap();
        assert!(soft_ratio > sharp_ratio, "{soft_ratio} vs {sharp_ratio}");
    }

    #[test]
    fn constant_image_has_no_edges() {
        let img = RasterImage::solid_rgb(32, 32, [0.3; 3]);
        let counts = edge_structure_counts(&img, DEFAULT_EDGE_THRESHOLD).unwrap();
        assert_eq!(counts, EdgeStructureCounts::default());
        assert_eq!(counts.blur_ratio(), 0.0);
    }

    #[test]
    fn edge_structure_needs_8x8() {
        let img = RasterImage::solid_rgb(7, 32, [0.3; 3]);
        assert!(matches!(
            blur_edge_structure(&img, DEFAULT_EDGE_THRESHOLD),
            Err(Error::TooSmall { .. })
        ));
    }

    #[test]
    fn counts_are_consistent() {
        for seed in 0..5 {
            let img = gaussian_blur(&noise(48, 40, seed), 1.0 + seed as f64 * 0.5).unwrap();
            let c = edge_structure_counts(&img, DEFAULT_EDGE_THRESHOLD).unwrap();
            assert!(c.n_blurred_gstep_roof <= c.n_gstep_roof);
            assert!(c.n_dirac_astep + c.n_gstep_roof <= c.n_edges);
            assert!((0.0..=1.0).contains(&c.blur_ratio()));
        }
    }

    #[test]
    fn both_estimators_ignore_half_turn_rotation() {
        for seed in 0..3 {
            let img = gaussian_blur(&noise(64, 64, seed), 1.5).unwrap();
            let rot = rotate_180(&img);
            let f = |i: &RasterImage| blur_frequency_relative(i, 5.0).unwrap();
            let t = |i: &RasterImage| blur_edge_structure(i, DEFAULT_EDGE_THRESHOLD).unwrap();
            assert!((f(&img) - f(&rot)).abs() < 1e-6);
            assert!((t(&img) - t(&rot)).abs() < 1e-6);
        }
    }
}
