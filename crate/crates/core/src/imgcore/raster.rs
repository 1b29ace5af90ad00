use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColorSpace {
    Rgb,
    Gray,
    Hsv,
    Lab,
}

impl ColorSpace {
    pub fn channels(self) -> usize {
        match self {
            ColorSpace::Gray => 1,
            _ => 3,
        }
    }

    /// Declared per-channel sample range, `None` meaning unbounded.
    fn channel_range(self, channel: usize) -> Option<(f64, f64)> {
        match (self, channel) {
            (ColorSpace::Rgb | ColorSpace::Gray, _) => Some((0.0, 1.0)),
            // hue is half-open, checked separately
            (ColorSpace::Hsv, 0) => Some((0.0, 360.0)),
            (ColorSpace::Hsv, _) => Some((0.0, 1.0)),
            (ColorSpace::Lab, 0) => Some((0.0, 100.0)),
            (ColorSpace::Lab, _) => None,
        }
    }
}

/// A single-channel plane of unconstrained reals: filter responses,
/// subbands, saliency values.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!("empty plane {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Plane::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "plane must be non-empty");
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "plane must be non-empty");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    /// Read with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A decoded image in a declared color space.
///
/// Sample ranges: RGB and Gray in `[0,1]`; HSV with hue in `[0,360)` and
/// S, V in `[0,1]`; Lab with L in `[0,100]` (a and b unbounded).
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    colorspace: ColorSpace,
    data: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, colorspace: ColorSpace, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!("empty image {width}x{height}")));
        }
        let channels = colorspace.channels();
        if data.len() != width * height * channels {
            return Err(Error::InvalidRaster(format!(
                "{width}x{height}x{channels} image needs {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            let channel = i % channels;
            if !v.is_finite() {
                return Err(Error::InvalidRaster(format!("non-finite sample at index {i}")));
            }
            if let Some((lo, hi)) = colorspace.channel_range(channel) {
                let hue = colorspace == ColorSpace::Hsv && channel == 0;
                let out = v < lo || if hue { v >= hi } else { v > hi };
                if out {
                    return Err(Error::InvalidRaster(format!(
                        "sample {v} at index {i} outside {colorspace:?} channel {channel} range"
                    )));
                }
            }
        }
        Ok(RasterImage {
            width,
            height,
            colorspace,
            data,
        })
    }

    pub(crate) fn new_unchecked(width: usize, height: usize, colorspace: ColorSpace, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * colorspace.channels());
        RasterImage {
            width,
            height,
            colorspace,
            data,
        }
    }

    /// Builds an RGB image from a per-pixel closure; values are clamped to `[0,1]`.
    pub fn rgb_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                for v in f(x, y) {
                    data.push(v.clamp(0.0, 1.0));
                }
            }
        }
        RasterImage::new_unchecked(width, height, ColorSpace::Rgb, data)
    }

    /// RGB image whose three channels all equal `f(x, y)`, clamped to `[0,1]`.
    pub fn gray_rgb_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        RasterImage::rgb_from_fn(width, height, |x, y| {
            let v = f(x, y);
            [v, v, v]
        })
    }

    pub fn solid_rgb(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        RasterImage::rgb_from_fn(width, height, |_, _| rgb)
    }

    /// Wraps a plane as a single-channel Gray image, clamping to `[0,1]`.
    pub fn from_gray_plane(plane: &Plane) -> Self {
        let data = plane.data().iter().map(|v| v.clamp(0.0, 1.0)).collect();
        RasterImage::new_unchecked(plane.width(), plane.height(), ColorSpace::Gray, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.colorspace.channels()
    }

    #[inline]
    pub fn colorspace(&self) -> ColorSpace {
        self.colorspace
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let c = self.channels();
        let start = (y * self.width + x) * c;
        &self.data[start..start + c]
    }

    pub fn channel(&self, channel: usize) -> Plane {
        let c = self.channels();
        assert!(channel < c, "channel {channel} out of range for {c}-channel image");
        let data = self.data.iter().skip(channel).step_by(c).copied().collect();
        Plane {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn from_channels(colorspace: ColorSpace, planes: &[Plane]) -> Result<Self> {
        let c = colorspace.channels();
        if planes.len() != c {
            return Err(Error::InvalidRaster(format!(
                "{colorspace:?} needs {c} planes, got {}",
                planes.len()
            )));
        }
        let (w, h) = (planes[0].width(), planes[0].height());
        if planes.iter().any(|p| p.width() != w || p.height() != h) {
            return Err(Error::InvalidRaster("channel planes differ in size".into()));
        }
        let mut data = Vec::with_capacity(w * h * c);
        for i in 0..w * h {
            for p in planes {
                data.push(p.data()[i]);
            }
        }
        RasterImage::new(w, h, colorspace, data)
    }

    /// Rec. 601 luma for RGB input; identity for Gray.
    pub fn to_gray(&self) -> Plane {
        match self.colorspace {
            ColorSpace::Gray => self.channel(0),
            ColorSpace::Rgb => {
                let data = self
                    .data
                    .chunks_exact(3)
                    .map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2])
                    .collect();
                Plane {
                    width: self.width,
                    height: self.height,
                    data,
                }
            }
            other => panic!("to_gray called on {other:?} image"),
        }
    }

    pub fn ensure_min_size(&self, min: usize) -> Result<()> {
        if self.width < min || self.height < min {
            Err(Error::too_small(self.width, self.height, min))
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_rgb(&self) -> Result<()> {
        if self.colorspace == ColorSpace::Rgb {
            Ok(())
        } else {
            Err(Error::InvalidRaster(format!(
                "expected an RGB image, got {:?}",
                self.colorspace
            )))
        }
    }
}
