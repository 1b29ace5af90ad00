use std::path::Path;

use image::DynamicImage;

use super::{ColorSpace, RasterImage};
use crate::{Error, Result};

/// Decodes a PNG or JPEG byte stream into an RGB image with samples in `[0,1]`.
/// Alpha is dropped; 16-bit sources keep their full precision.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    let format = image::guess_format(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    if !matches!(format, image::ImageFormat::Png | image::ImageFormat::Jpeg) {
        return Err(Error::Decode(format!("unsupported format {format:?}")));
    }
    let decoded = image::load_from_memory_with_format(bytes, format).map_err(|e| Error::Decode(e.to_string()))?;
    Ok(from_dynamic(&decoded))
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::at_path(path, e))?;
    decode_image(&bytes)
}

/// Encodes an RGB or Gray image as 8-bit PNG, rounding samples to the nearest level.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let bytes: Vec<u8> = img.data().iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8).collect();
    let dynamic = match img.colorspace() {
        ColorSpace::Rgb => DynamicImage::ImageRgb8(image::RgbImage::from_raw(w, h, bytes).expect("buffer size")),
        ColorSpace::Gray => DynamicImage::ImageLuma8(image::GrayImage::from_raw(w, h, bytes).expect("buffer size")),
        other => {
            return Err(Error::UnsupportedConversion {
                from: other,
                to: ColorSpace::Rgb,
            })
        }
    };
    let mut out = std::io::Cursor::new(Vec::new());
    dynamic
        .write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| Error::Decode(e.to_string()))?;
    Ok(out.into_inner())
}

pub fn save_png(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_png(img)?).map_err(|e| Error::at_path(path, e))
}

fn from_dynamic(img: &DynamicImage) -> RasterImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => img
            .to_rgb16()
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) / 65535.0)
            .collect(),
        _ => img
            .to_rgb8()
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) / 255.0)
            .collect(),
    };
    RasterImage::new_unchecked(w, h, ColorSpace::Rgb, data)
}
