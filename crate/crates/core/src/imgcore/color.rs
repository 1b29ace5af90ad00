use super::{ColorSpace, RasterImage};
use crate::{Error, Result};

// D65 reference white, Y normalized to 1.
const WHITE_X: f64 = 0.95047;
const WHITE_Y: f64 = 1.0;
const WHITE_Z: f64 = 1.08883;

/// HSV from RGB in `[0,1]`: hue in degrees `[0,360)`, S and V in `[0,1]`.
/// Achromatic pixels get hue 0.
pub fn hsv_from_rgb(rgb: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = rgb;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let v = max;
    let s = if max > 0.0 { chroma / max } else { 0.0 };
    if chroma <= 0.0 {
        return [0.0, s, v];
    }
    let sector = if max == r {
        ((g - b) / chroma).rem_euclid(6.0)
    } else if max == g {
        (b - r) / chroma + 2.0
    } else {
        (r - g) / chroma + 4.0
    };
    let mut h = 60.0 * sector;
    if h >= 360.0 {
        h -= 360.0;
    }
    [h.max(0.0), s, v]
}

#[inline]
fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// CIE Lab (sRGB primaries, D65 white) from RGB in `[0,1]`. L is clamped to `[0,100]`.
pub fn lab_from_rgb(rgb: [f64; 3]) -> [f64; 3] {
    let r = srgb_to_linear(rgb[0]);
    let g = srgb_to_linear(rgb[1]);
    let b = srgb_to_linear(rgb[2]);
    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    let fx = lab_f(x / WHITE_X);
    let fy = lab_f(y / WHITE_Y);
    let fz = lab_f(z / WHITE_Z);
    let l = (116.0 * fy - 16.0).clamp(0.0, 100.0);
    [l, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Converts an RGB image to `target`. Conversions are defined from RGB only.
pub fn convert_colorspace(img: &RasterImage, target: ColorSpace) -> Result<RasterImage> {
    if img.colorspace() != ColorSpace::Rgb {
        return Err(Error::UnsupportedConversion {
            from: img.colorspace(),
            to: target,
        });
    }
    let (w, h) = (img.width(), img.height());
    let pixels = img.data().chunks_exact(3).map(|p| [p[0], p[1], p[2]]);
    let data: Vec<f64> = match target {
        ColorSpace::Rgb => return Ok(img.clone()),
        ColorSpace::Gray => return Ok(RasterImage::new_unchecked(w, h, ColorSpace::Gray, img.to_gray().into_data())),
        ColorSpace::Hsv => pixels.flat_map(hsv_from_rgb).collect(),
        ColorSpace::Lab => pixels.flat_map(lab_from_rgb).collect(),
    };
    Ok(RasterImage::new_unchecked(w, h, target, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_pixel(rgb: [f64; 3]) -> RasterImage {
        RasterImage::solid_rgb(1, 1, rgb)
    }

    #[test]
    fn white_is_full_lightness() {
        let lab = convert_colorspace(&one_pixel([1.0, 1.0, 1.0]), ColorSpace::Lab).unwrap();
        assert!((lab.data()[0] - 100.0).abs() < 0.1);
        assert!(lab.data()[1].abs() < 0.01 && lab.data()[2].abs() < 0.01);
    }

    #[test]
    fn black_is_zero_lightness() {
        assert!(lab_from_rgb([0.0; 3])[0].abs() < 0.1);
    }

    #[test]
    fn gray_has_no_saturation() {
        let hsv = convert_colorspace(&one_pixel([0.5, 0.5, 0.5]), ColorSpace::Hsv).unwrap();
        assert_eq!(hsv.data()[1], 0.0);
        assert_eq!(hsv.data()[2], 0.5);
    }

    #[test]
    fn red_hue() {
        assert_eq!(hsv_from_rgb([1.0, 0.0, 0.0]), [0.0, 1.0, 1.0]);
        assert_eq!(hsv_from_rgb([0.0, 1.0, 0.0])[0], 120.0);
        assert_eq!(hsv_from_rgb([0.0, 0.0, 1.0])[0], 240.0);
        // magenta side of red wraps into [300,360)
        let h = hsv_from_rgb([1.0, 0.0, 0.5])[0];
        assert!((h - 330.0).abs() < 1e-9);
    }

    #[test]
    fn mid_gray_lab_matches_reference() {
        // sRGB 128/255 has L* ~ 53.585
        let l = lab_from_rgb([128.0 / 255.0; 3])[0];
        assert!((l - 53.585).abs() < 0.01, "{l}");
    }

    #[test]
    fn conversions_only_from_rgb() {
        let hsv = convert_colorspace(&one_pixel([0.2, 0.4, 0.6]), ColorSpace::Hsv).unwrap();
        assert!(matches!(
            convert_colorspace(&hsv, ColorSpace::Lab),
            Err(Error::UnsupportedConversion { .. })
        ));
    }
}
