use rustfft::num_complex::Complex64;

use crate::imgcore::{
    box_filter_3x3, fft2, gaussian_blur_plane, resize_plane, Fft2Direction, Plane, RasterImage,
};
use crate::{Error, Result};

/// Side of the square the image is resampled to before the spectral analysis.
pub const SR_WORKING_SIZE: usize = 64;
/// Gaussian σ applied to the squared reconstruction.
pub const SR_SIGMA: f64 = 2.5;

/// Offset added to amplitudes before the log, as a fraction of the mean
/// amplitude. Keeps exact spectral zeros from dominating the local average.
const LOG_FLOOR: f64 = 0.1;
/// Spectral bins below this fraction of the peak magnitude carry no phase.
const PHASE_FLOOR: f64 = 1e-8;
/// Maps whose relative dynamic range is below this are treated as flat.
const FLAT_TOLERANCE: f64 = 1e-9;

/// Saliency plane scaled so its maximum is 1, or identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap(Plane);

impl SaliencyMap {
    /// Wraps a plane after checking every value lies in `[0, 1]`.
    pub fn from_plane(plane: Plane) -> Result<Self> {
        if plane.data().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidRaster("saliency values must lie in [0, 1]".into()));
        }
        Ok(SaliencyMap(plane))
    }

    pub fn plane(&self) -> &Plane {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }
}

/// Raw spectral-residual response of a plane, before smoothing and scaling.
pub(crate) fn spectral_residual_response(gray: &Plane) -> Plane {
    let (w, h) = (gray.width(), gray.height());
    let mut spectrum: Vec<Complex64> = gray.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut spectrum, w, h, Fft2Direction::Forward);

    let amplitude: Vec<f64> = spectrum.iter().map(|c| c.norm()).collect();
    let peak = amplitude.iter().copied().fold(0.0, f64::max);
    let floor = LOG_FLOOR * amplitude.iter().sum::<f64>() / amplitude.len() as f64;
    let log_amp = Plane::new(w, h, amplitude.iter().map(|a| (a + floor).ln()).collect())
        .expect("same extent");
    let smoothed = box_filter_3x3(&log_amp);

    for (i, c) in spectrum.iter_mut().enumerate() {
        let a = amplitude[i];
        *c = if a > PHASE_FLOOR * peak {
            let residual = log_amp.data()[i] - smoothed.data()[i];
            *c / a * residual.exp()
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    fft2(&mut spectrum, w, h, Fft2Direction::Inverse);
    Plane::new(w, h, spectrum.iter().map(|c| c.norm_sqr()).collect()).expect("same extent")
}

/// Spectral-residual saliency: grayscale, 64×64 resample, log-amplitude
/// residual against its 3×3 local mean, inverse transform with the original
/// phase, squared magnitude, Gaussian smoothing, upsampling to the source
/// size and scaling by the maximum. Flat responses give an all-zero map.
pub fn spectral_residual_saliency(img: &RasterImage) -> Result<SaliencyMap> {
    let gray = match img.colorspace() {
        crate::ColorSpace::Rgb | crate::ColorSpace::Gray => img.to_gray(),
        other => return Err(Error::InvalidRaster(format!("saliency expects RGB or Gray, got {other:?}"))),
    };
    let small = resize_plane(&gray, SR_WORKING_SIZE, SR_WORKING_SIZE);
    let response = spectral_residual_response(&small);
    let smooth = gaussian_blur_plane(&response, SR_SIGMA)?;
    let full = resize_plane(&smooth, img.width(), img.height());
    let (lo, hi) = (full.min(), full.max());
    let plane = if !(hi > 0.0) || hi - lo <= FLAT_TOLERANCE * hi {
        Plane::zeros(img.width(), img.height())
    } else {
        full.map(|v| (v / hi).clamp(0.0, 1.0))
    };
    Ok(SaliencyMap(plane))
}
