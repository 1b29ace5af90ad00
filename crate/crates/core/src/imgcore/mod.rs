//! Deterministic image primitives shared by every extractor.
//!
//! Conventions used throughout:
//! - samples are `f64`, row-major, interleaved by channel;
//! - out-of-range reads replicate the nearest edge sample;
//! - grayscale is Rec. 601 luma (`0.299 R + 0.587 G + 0.114 B`);
//! - accumulations run in a fixed order so results are bit-reproducible.

mod color;
mod decode;
mod fft;
mod filter;
mod histogram;
mod pyramid;
mod raster;
mod resize;

pub use color::{convert_colorspace, lab_from_rgb, hsv_from_rgb};
pub use decode::{decode_image, encode_png, load_image, save_png};
pub use fft::{fft2, fft2_magnitude, Fft2Direction};
pub use filter::{box_filter_3x3, gaussian_blur, gaussian_blur_plane, gaussian_kernel, laplacian_3x3};
pub use histogram::{minimal_mass_window, Histogram, MassWindow, WINDOW_SLACK};
pub use pyramid::{
    build_laplacian_pyramid, build_wavelet_pyramid, haar_forward, haar_inverse, HaarLevel,
    LaplacianPyramid, WaveletPyramid,
};
pub use raster::{ColorSpace, Plane, RasterImage};
pub use resize::{resize, resize_plane};
