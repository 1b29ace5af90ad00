#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use imgq::RasterImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn imgq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imgq"))
        .args(args)
        .env_remove("IMGQ_THREADS")
        .env_remove("IMGQ_SEED")
        .output()
        .expect("spawn imgq")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Multi-octave value noise under a layer of hard-edged light and dark rectangles.
pub fn textured_image(size: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let octaves: Vec<(usize, Vec<[f64; 3]>)> = [4usize, 8, 16, 32]
        .iter()
        .map(|&cell| {
            let g = size / cell + 2;
            (cell, (0..g * g).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect())
        })
        .collect();
    let rects: Vec<([usize; 4], f64)> = (0..30)
        .map(|_| {
            let (w, h) = (rng.gen_range(size / 16..size / 3), rng.gen_range(size / 16..size / 3));
            let level = if rng.gen::<bool>() {
                rng.gen_range(0.0..0.3)
            } else {
                rng.gen_range(0.7..1.0)
            };
            ([rng.gen_range(0..size - w), rng.gen_range(0..size - h), w, h], level)
        })
        .collect();
    RasterImage::rgb_from_fn(size, size, |x, y| {
        let hit = rects
            .iter()
            .rev()
            .find(|([x0, y0, w, h], _)| x >= *x0 && x < x0 + w && y >= *y0 && y < y0 + h);
        if let Some((_, level)) = hit {
            return [*level; 3];
        }
        let mut out = [0.0; 3];
        for (k, (cell, grid)) in octaves.iter().enumerate() {
            let g = size / cell + 2;
            let (fx, fy) = (x as f64 / *cell as f64, y as f64 / *cell as f64);
            let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
            let (tx, ty) = (fx - ix as f64, fy - iy as f64);
            let weight = 0.5f64.powi(k as i32) / 1.875;
            for (c, o) in out.iter_mut().enumerate() {
                let v = |i: usize, j: usize| grid[j * g + i][c];
                let top = v(ix, iy) * (1.0 - tx) + v(ix + 1, iy) * tx;
                let bottom = v(ix, iy + 1) * (1.0 - tx) + v(ix + 1, iy + 1) * tx;
                *o += weight * (top * (1.0 - ty) + bottom * ty);
            }
        }
        out
    })
}

pub fn random_image(w: usize, h: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RasterImage::rgb_from_fn(w, h, |_, _| [rng.gen(), rng.gen(), rng.gen()])
}
