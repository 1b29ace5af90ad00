use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fft2Direction {
    Forward,
    /// Inverse transform scaled by `1/(MN)`, so forward then inverse is the identity.
    Inverse,
}

/// In-place 2-D DFT of a row-major `width × height` buffer: rows first, then columns.
pub fn fft2(buf: &mut [Complex64], width: usize, height: usize, direction: Fft2Direction) {
    assert_eq!(buf.len(), width * height, "buffer does not match {width}x{height}");
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = match direction {
        Fft2Direction::Forward => (planner.plan_fft_forward(width), planner.plan_fft_forward(height)),
        Fft2Direction::Inverse => (planner.plan_fft_inverse(width), planner.plan_fft_inverse(height)),
    };
    for row in buf.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = buf[y * width + x];
        }
        col_fft.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            buf[y * width + x] = *c;
        }
    }
    if direction == Fft2Direction::Inverse {
        let scale = 1.0 / (width * height) as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
    }
}

/// Unnormalized DFT magnitude with DC at `(0, 0)`.
pub fn fft2_magnitude(gray: &Plane) -> Plane {
    let (w, h) = (gray.width(), gray.height());
    let mut buf: Vec<Complex64> = gray.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, w, h, Fft2Direction::Forward);
    Plane::new(w, h, buf.iter().map(|c| c.norm()).collect()).expect("same extent as input")
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn naive_dft_magnitude(p: &Plane) -> Vec<f64> {
        let (w, h) = (p.width(), p.height());
        let mut out = Vec::with_capacity(w * h);
        for v in 0..h {
            for u in 0..w {
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..h {
                    for x in 0..w {
                        let angle = -2.0 * PI * ((u * x) as f64 / w as f64 + (v * y) as f64 / h as f64);
                        acc += Complex64::from_polar(p.get(x, y), angle);
                    }
                }
                out.push(acc.norm());
            }
        }
        out
    }

    fn random_plane(w: usize, h: usize, seed: u64) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Plane::from_fn(w, h, |_, _| rng.gen::<f64>())
    }

    #[test]
    fn constant_has_only_dc() {
        let mag = fft2_magnitude(&Plane::filled(6, 4, 0.5));
        assert!((mag.get(0, 0) - 6.0 * 4.0 * 0.5).abs() < 1e-12);
        assert!(mag.data()[1..].iter().all(|&m| m < 1e-12));
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let p = Plane::from_fn(8, 5, |x, y| if (x, y) == (0, 0) { 1.0 } else { 0.0 });
        assert!(fft2_magnitude(&p).data().iter().all(|m| (m - 1.0).abs() < 1e-12));
    }

    #[test]
    fn matches_naive_dft() {
        let p = random_plane(8, 8, 11);
        let fast = fft2_magnitude(&p);
        let slow = naive_dft_magnitude(&p);
        let max_diff = fast.data().iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(max_diff < 1e-9, "{max_diff}");
    }

    #[test]
    fn parseval_holds() {
        for seed in 0..5 {
            let p = random_plane(16, 16, seed);
            let spectral: f64 = fft2_magnitude(&p).data().iter().map(|m| m * m).sum();
            let spatial: f64 = 256.0 * p.data().iter().map(|v| v * v).sum::<f64>();
            assert!(((spectral - spatial) / spatial).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let p = random_plane(12, 10, 3);
        let mut buf: Vec<Complex64> = p.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut buf, 12, 10, Fft2Direction::Forward);
        fft2(&mut buf, 12, 10, Fft2Direction::Inverse);
        for (c, v) in buf.iter().zip(p.data()) {
            assert!((c.re - v).abs() < 1e-12 && c.im.abs() < 1e-12);
        }
    }
}
