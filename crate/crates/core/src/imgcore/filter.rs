use super::{ColorSpace, Plane, RasterImage};
use crate::{Error, Result};

/// Absolute 8-connected Laplacian (center 8, ring −1) with edge replication.
///
/// Each channel is filtered and rectified independently; the output is the
/// per-pixel mean across channels.
pub fn laplacian_3x3(img: &RasterImage) -> Result<Plane> {
    if !matches!(img.colorspace(), ColorSpace::Rgb | ColorSpace::Gray) {
        return Err(Error::InvalidRaster(format!(
            "laplacian expects RGB or Gray, got {:?}",
            img.colorspace()
        )));
    }
    img.ensure_min_size(3)?;
    let channels = img.channels();
    let mut out = Plane::zeros(img.width(), img.height());
    for c in 0..channels {
        let plane = img.channel(c);
        let response = abs_laplacian(&plane);
        for (o, r) in out.data_mut().iter_mut().zip(response.data()) {
            *o += r;
        }
    }
    if channels > 1 {
        let n = channels as f64;
        out.data_mut().iter_mut().for_each(|v| *v /= n);
    }
    Ok(out)
}

fn abs_laplacian(p: &Plane) -> Plane {
    Plane::from_fn(p.width(), p.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        let center = p.get_clamped(x, y);
        // summing differences keeps constant regions exactly zero
        let mut acc = 0.0;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx != 0 || dy != 0 {
                    acc += center - p.get_clamped(x + dx, y + dy);
                }
            }
        }
        acc.abs()
    })
}

/// Normalized 1-D Gaussian taps with radius `ceil(3σ)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius).map(|i| (-((i * i) as f64) / denom).exp()).collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    Ok(taps)
}

fn convolve_rows(p: &Plane, taps: &[f64]) -> Plane {
    let r = (taps.len() / 2) as isize;
    Plane::from_fn(p.width(), p.height(), |x, y| {
        taps.iter()
            .enumerate()
            .map(|(k, t)| t * p.get_clamped(x as isize + k as isize - r, y as isize))
            .sum()
    })
}

fn convolve_cols(p: &Plane, taps: &[f64]) -> Plane {
    let r = (taps.len() / 2) as isize;
    Plane::from_fn(p.width(), p.height(), |x, y| {
        taps.iter()
            .enumerate()
            .map(|(k, t)| t * p.get_clamped(x as isize, y as isize + k as isize - r))
            .sum()
    })
}

/// Separable Gaussian blur of a plane, edge replication.
pub fn gaussian_blur_plane(p: &Plane, sigma: f64) -> Result<Plane> {
    let taps = gaussian_kernel(sigma)?;
    Ok(convolve_cols(&convolve_rows(p, &taps), &taps))
}

/// Channel-wise separable Gaussian blur. The kernel sums to one, so the
/// output stays within the input's sample range.
pub fn gaussian_blur(img: &RasterImage, sigma: f64) -> Result<RasterImage> {
    let taps = gaussian_kernel(sigma)?;
    let planes: Vec<Plane> = (0..img.channels())
        .map(|c| convolve_cols(&convolve_rows(&img.channel(c), &taps), &taps))
        .collect();
    let (w, h) = (img.width(), img.height());
    let c = img.channels();
    let mut data = Vec::with_capacity(w * h * c);
    for i in 0..w * h {
        for p in &planes {
            data.push(p.data()[i]);
        }
    }
    if matches!(img.colorspace(), ColorSpace::Rgb | ColorSpace::Gray) {
        data.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    }
    Ok(RasterImage::new_unchecked(w, h, img.colorspace(), data))
}

/// 3×3 mean filter with edge replication.
pub fn box_filter_3x3(p: &Plane) -> Plane {
    let taps = [1.0 / 3.0; 3];
    convolve_cols(&convolve_rows(p, &taps), &taps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulse(w: usize, h: usize, at: (usize, usize)) -> Plane {
        Plane::from_fn(w, h, |x, y| if (x, y) == at { 1.0 } else { 0.0 })
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let img = RasterImage::solid_rgb(5, 4, [0.3, 0.6, 0.9]);
        assert!(laplacian_3x3(&img).unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_impulse_matches_hand_convolution() {
        let img = RasterImage::from_gray_plane(&impulse(7, 7, (3, 3)));
        let lap = laplacian_3x3(&img).unwrap();
        for y in 0..7 {
            for x in 0..7 {
                let (dx, dy) = (x as i32 - 3, y as i32 - 3);
                let expected = if dx == 0 && dy == 0 {
                    8.0
                } else if dx.abs() <= 1 && dy.abs() <= 1 {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(lap.get(x, y), expected, "at ({x},{y})");
            }
        }
    }

    #[test]
    fn laplacian_annihilates_ramps_in_interior() {
        let img = RasterImage::gray_rgb_from_fn(9, 9, |x, y| 0.05 * x as f64 + 0.03 * y as f64);
        let lap = laplacian_3x3(&img).unwrap();
        for y in 1..8 {
            for x in 1..8 {
                assert!(lap.get(x, y) < 1e-12);
            }
        }
    }

    #[test]
    fn laplacian_rgb_is_channel_mean() {
        let img = RasterImage::rgb_from_fn(5, 5, |x, y| if (x, y) == (2, 2) { [1.0, 0.0, 0.0] } else { [0.0; 3] });
        let lap = laplacian_3x3(&img).unwrap();
        assert!((lap.get(2, 2) - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn laplacian_needs_3x3() {
        let img = RasterImage::solid_rgb(2, 5, [0.0; 3]);
        assert!(matches!(laplacian_3x3(&img), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn blur_constant_unchanged() {
        let img = RasterImage::solid_rgb(6, 6, [0.25, 0.5, 0.75]);
        for sigma in [0.3, 1.0, 4.0] {
            let out = gaussian_blur(&img, sigma).unwrap();
            for (a, b) in out.data().iter().zip(img.data()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn blur_impulse_center_is_squared_tap() {
        let p = impulse(15, 15, (7, 7));
        let taps = gaussian_kernel(1.0).unwrap();
        assert_eq!(taps.len(), 7);
        let center = taps[3];
        // dense 2-D convolution oracle
        let mut dense = 0.0;
        for (i, a) in taps.iter().enumerate() {
            for (j, b) in taps.iter().enumerate() {
                if i == 3 && j == 3 {
                    dense += a * b * p.get(7, 7);
                }
            }
        }
        let out = gaussian_blur_plane(&p, 1.0).unwrap();
        assert!((out.get(7, 7) - center * center).abs() < 1e-15);
        assert!((out.get(7, 7) - dense).abs() < 1e-15);
    }

    #[test]
    fn invalid_sigma() {
        assert!(matches!(gaussian_kernel(0.0), Err(Error::InvalidSigma(_))));
        assert!(matches!(gaussian_kernel(-1.0), Err(Error::InvalidSigma(_))));
    }

    #[test]
    fn box_filter_of_impulse() {
        let out = box_filter_3x3(&impulse(5, 5, (2, 2)));
        assert!((out.get(1, 1) - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(out.get(0, 0), 0.0);
    }
}
