use super::Plane;
use crate::{Error, Result};

const BINOMIAL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Burt–Adelson Laplacian pyramid. `planes[0]` is the full-resolution
/// band-pass plane ("the bottom"); the last plane is the low-pass residual.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianPyramid {
    planes: Vec<Plane>,
}

impl LaplacianPyramid {
    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn levels(&self) -> usize {
        self.planes.len()
    }

    /// Band-pass plane at `level`, 0 being the finest.
    pub fn band(&self, level: usize) -> &Plane {
        &self.planes[level]
    }

    pub fn approximation(&self) -> &Plane {
        self.planes.last().expect("pyramid has at least one plane")
    }

    pub fn collapse(&self) -> Plane {
        let mut acc = self.approximation().clone();
        for band in self.planes.iter().rev().skip(1) {
            let mut up = expand(&acc, band.width(), band.height());
            for (u, b) in up.data_mut().iter_mut().zip(band.data()) {
                *u += b;
            }
            acc = up;
        }
        acc
    }
}

#[inline]
fn half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Binomial smoothing followed by keeping even rows and columns.
fn reduce(p: &Plane) -> Plane {
    let (w, h) = (p.width(), p.height());
    let rows = Plane::from_fn(half(w), h, |x, y| {
        let cx = 2 * x as isize;
        BINOMIAL5
            .iter()
            .enumerate()
            .map(|(k, t)| t * p.get_clamped(cx + k as isize - 2, y as isize))
            .sum()
    });
    Plane::from_fn(half(w), half(h), |x, y| {
        let cy = 2 * y as isize;
        BINOMIAL5
            .iter()
            .enumerate()
            .map(|(k, t)| t * rows.get_clamped(x as isize, cy + k as isize - 2))
            .sum()
    })
}

/// Zero-insertion upsampling to `width × height` with binomial interpolation;
/// coarse samples outside the plane are edge-replicated.
fn expand(p: &Plane, width: usize, height: usize) -> Plane {
    let rows = Plane::from_fn(width, p.height(), |x, y| {
        let mut acc = 0.0;
        for (k, t) in BINOMIAL5.iter().enumerate() {
            let src = x as isize - (k as isize - 2);
            if src.rem_euclid(2) == 0 {
                acc += t * p.get_clamped(src.div_euclid(2), y as isize);
            }
        }
        2.0 * acc
    });
    Plane::from_fn(width, height, |x, y| {
        let mut acc = 0.0;
        for (k, t) in BINOMIAL5.iter().enumerate() {
            let src = y as isize - (k as isize - 2);
            if src.rem_euclid(2) == 0 {
                acc += t * rows.get_clamped(x as isize, src.div_euclid(2));
            }
        }
        2.0 * acc
    })
}

/// Builds a Laplacian pyramid with `levels` planes in total (`levels − 1`
/// band-pass planes plus the low-pass residual). Each level halves the
/// extent, rounding up. Requires `min(width, height) ≥ 2^levels`.
pub fn build_laplacian_pyramid(gray: &Plane, levels: usize) -> Result<LaplacianPyramid> {
    if levels == 0 {
        return Err(Error::InvalidParameter("pyramid needs at least one level".into()));
    }
    let min = 1usize << levels;
    if gray.width() < min || gray.height() < min {
        return Err(Error::too_small(gray.width(), gray.height(), min));
    }
    let mut planes = Vec::with_capacity(levels);
    let mut current = gray.clone();
    for _ in 1..levels {
        let coarse = reduce(&current);
        let mut band = current;
        let up = expand(&coarse, band.width(), band.height());
        for (b, u) in band.data_mut().iter_mut().zip(up.data()) {
            *b -= u;
        }
        planes.push(band);
        current = coarse;
    }
    planes.push(current);
    Ok(LaplacianPyramid { planes })
}

/// One level of the orthonormal 2-D Haar (Daubechies-1) transform.
///
/// For each 2×2 block `[[a, b], [c, d]]`:
/// `LL = (a+b+c+d)/2`, `HL = (a−b+c−d)/2` (horizontal detail, responds to
/// vertical edges), `LH = (a+b−c−d)/2`, `HH = (a−b−c+d)/2`. Odd extents are
/// padded by replicating the last row or column.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarLevel {
    pub approx: Plane,
    pub hl: Plane,
    pub lh: Plane,
    pub hh: Plane,
    /// Extent of the plane this level was computed from.
    pub source_width: usize,
    pub source_height: usize,
}

impl HaarLevel {
    pub fn subbands(&self) -> [&Plane; 3] {
        [&self.hl, &self.lh, &self.hh]
    }
}

pub fn haar_forward(p: &Plane) -> HaarLevel {
    let (w, h) = (half(p.width()), half(p.height()));
    let mut approx = Plane::zeros(w, h);
    let mut hl = Plane::zeros(w, h);
    let mut lh = Plane::zeros(w, h);
    let mut hh = Plane::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let (x0, y0) = (2 * x as isize, 2 * y as isize);
            let a = p.get_clamped(x0, y0);
            let b = p.get_clamped(x0 + 1, y0);
            let c = p.get_clamped(x0, y0 + 1);
            let d = p.get_clamped(x0 + 1, y0 + 1);
            approx.set(x, y, (a + b + c + d) / 2.0);
            hl.set(x, y, (a - b + c - d) / 2.0);
            lh.set(x, y, (a + b - c - d) / 2.0);
            hh.set(x, y, (a - b - c + d) / 2.0);
        }
    }
    HaarLevel {
        approx,
        hl,
        lh,
        hh,
        source_width: p.width(),
        source_height: p.height(),
    }
}

/// Inverse of [`haar_forward`], given a (possibly modified) approximation plane.
pub fn haar_inverse(level: &HaarLevel, approx: &Plane) -> Plane {
    let mut out = Plane::zeros(level.source_width, level.source_height);
    for y in 0..approx.height() {
        for x in 0..approx.width() {
            let s = approx.get(x, y);
            let h = level.hl.get(x, y);
            let v = level.lh.get(x, y);
            let d = level.hh.get(x, y);
            let block = [
                (0, 0, (s + h + v + d) / 2.0),
                (1, 0, (s - h + v - d) / 2.0),
                (0, 1, (s + h - v - d) / 2.0),
                (1, 1, (s - h - v + d) / 2.0),
            ];
            for (dx, dy, value) in block {
                let (ox, oy) = (2 * x + dx, 2 * y + dy);
                if ox < out.width() && oy < out.height() {
                    out.set(ox, oy, value);
                }
            }
        }
    }
    out
}

/// Multi-level Haar decomposition; `levels()[0]` is the finest scale.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    levels: Vec<HaarLevel>,
}

impl WaveletPyramid {
    pub fn levels(&self) -> &[HaarLevel] {
        &self.levels
    }

    pub fn finest(&self) -> &HaarLevel {
        &self.levels[0]
    }

    pub fn reconstruct(&self) -> Plane {
        let mut approx = self.levels.last().expect("at least one level").approx.clone();
        for level in self.levels.iter().rev() {
            approx = haar_inverse(level, &approx);
        }
        approx
    }
}

/// Requires `min(width, height) ≥ 2^levels`.
pub fn build_wavelet_pyramid(gray: &Plane, levels: usize) -> Result<WaveletPyramid> {
    if levels == 0 {
        return Err(Error::InvalidParameter("wavelet pyramid needs at least one level".into()));
    }
    let min = 1usize << levels;
    if gray.width() < min || gray.height() < min {
        return Err(Error::too_small(gray.width(), gray.height(), min));
    }
    let mut out = Vec::with_capacity(levels);
    let mut current = gray.clone();
    for _ in 0..levels {
        let level = haar_forward(&current);
        current = level.approx.clone();
        out.push(level);
    }
    Ok(WaveletPyramid { levels: out })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_plane(w: usize, h: usize, seed: u64) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Plane::from_fn(w, h, |_, _| rng.gen::<f64>())
    }

    fn rms(a: &Plane, b: &Plane) -> f64 {
        let sq: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).powi(2)).sum();
        (sq / a.data().len() as f64).sqrt()
    }

    #[test]
    fn laplacian_plane_sizes_halve() {
        let pyr = build_laplacian_pyramid(&random_plane(64, 64, 1), 3).unwrap();
        let sizes: Vec<_> = pyr.planes().iter().map(|p| (p.width(), p.height())).collect();
        assert_eq!(sizes, vec![(64, 64), (32, 32), (16, 16)]);
        let odd = build_laplacian_pyramid(&random_plane(37, 21, 2), 3).unwrap();
        let sizes: Vec<_> = odd.planes().iter().map(|p| (p.width(), p.height())).collect();
        assert_eq!(sizes, vec![(37, 21), (19, 11), (10, 6)]);
    }

    #[test]
    fn laplacian_of_constant_has_zero_bands() {
        let pyr = build_laplacian_pyramid(&Plane::filled(32, 32, 0.7), 4).unwrap();
        for band in &pyr.planes()[..3] {
            assert!(band.data().iter().all(|v| v.abs() < 1e-12));
        }
        assert!(pyr.approximation().data().iter().all(|v| (v - 0.7).abs() < 1e-12));
    }

    #[test]
    fn laplacian_collapse_reconstructs() {
        for levels in 1..=4 {
            for (w, h, seed) in [(64, 64, 5), (45, 33, 6)] {
                let p = random_plane(w, h, seed);
                let pyr = build_laplacian_pyramid(&p, levels).unwrap();
                assert!(rms(&pyr.collapse(), &p) < 1e-6);
            }
        }
    }

    #[test]
    fn laplacian_too_small() {
        assert!(matches!(
            build_laplacian_pyramid(&Plane::zeros(7, 64), 3),
            Err(Error::TooSmall { .. })
        ));
    }

    #[test]
    fn haar_2x2_matches_hand_computation() {
        let (a, b, c, d) = (0.9, 0.2, 0.4, 0.1);
        let p = Plane::new(2, 2, vec![a, b, c, d]).unwrap();
        let pyr = build_wavelet_pyramid(&p, 1).unwrap();
        let l = pyr.finest();
        let expect = [
            (l.approx.get(0, 0), (a + b + c + d) / 2.0),
            (l.hl.get(0, 0), (a - b + c - d) / 2.0),
            (l.lh.get(0, 0), (a + b - c - d) / 2.0),
            (l.hh.get(0, 0), (a - b - c + d) / 2.0),
        ];
        for (got, want) in expect {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn haar_details_of_constant_vanish() {
        let pyr = build_wavelet_pyramid(&Plane::filled(17, 12, 0.3), 3).unwrap();
        for level in pyr.levels() {
            for band in level.subbands() {
                assert!(band.data().iter().all(|v| v.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn haar_orientation_selectivity() {
        // vertical edge between columns 4 and 5 (inside a 2x2 block)
        let p = Plane::from_fn(16, 16, |x, _| if x >= 5 { 1.0 } else { 0.0 });
        let l = haar_forward(&p);
        let energy = |q: &Plane| q.data().iter().map(|v| v * v).sum::<f64>();
        assert!(energy(&l.hl) > 1.0);
        assert_eq!(energy(&l.lh), 0.0);
        assert_eq!(energy(&l.hh), 0.0);
    }

    #[test]
    fn haar_reconstructs() {
        for (w, h) in [(32, 32), (33, 19), (8, 8)] {
            let p = random_plane(w, h, (w * h) as u64);
            let pyr = build_wavelet_pyramid(&p, 3).unwrap();
            assert!(rms(&pyr.reconstruct(), &p) < 1e-9);
        }
    }

    #[test]
    fn haar_preserves_energy_on_even_sizes() {
        let p = random_plane(16, 16, 9);
        let l = haar_forward(&p);
        let e = |q: &Plane| q.data().iter().map(|v| v * v).sum::<f64>();
        let total = e(&l.approx) + e(&l.hl) + e(&l.lh) + e(&l.hh);
        assert!((total - e(&p)).abs() < 1e-9);
    }
}
