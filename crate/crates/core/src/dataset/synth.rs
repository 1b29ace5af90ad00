use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{write_manifest, ListingRecord};
use crate::imgcore::{gaussian_blur, save_png};
use crate::{Error, RasterImage, Result};

pub const PREMIUM_TOKENS: [&str; 5] = ["premium", "handmade", "artisan", "vintage", "organic"];
const NOUNS: [&str; 10] = [
    "mug", "scarf", "necklace", "print", "candle", "bowl", "quilt", "ring", "poster", "lamp",
];
const ADJECTIVES: [&str; 10] = [
    "red", "blue", "green", "small", "large", "cozy", "modern", "rustic", "bright", "soft",
];
const GENERIC_TAGS: [&str; 8] = ["gift", "home", "decor", "kitchen", "wedding", "birthday", "art", "style"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub image_size: usize,
    /// Blur sigma at latent quality 0; quality 1 is left sharp.
    pub max_blur_sigma: f64,
    pub max_clutter: usize,
    /// Subject distance from its thirds point at quality 0, as a fraction of the side.
    pub max_thirds_offset: f64,
    pub premium_probability: f64,
    pub quality_weight: f64,
    pub text_weight: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            image_size: 128,
            max_blur_sigma: 3.0,
            max_clutter: 12,
            max_thirds_offset: 0.25,
            premium_probability: 0.3,
            quality_weight: 8.0,
            text_weight: 1.5,
        }
    }
}

/// One generated listing with the latent variables that drove its popularity.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticListing {
    pub record: ListingRecord,
    pub latent_quality: f64,
    pub text_signal: u32,
    pub popular: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub manifest_path: PathBuf,
    pub listings: Vec<SyntheticListing>,
}

impl SyntheticCorpus {
    pub fn records(&self) -> Vec<ListingRecord> {
        self.listings.iter().map(|l| l.record.clone()).collect()
    }
}

pub fn generate_synthetic(n: usize, seed: u64, out_dir: impl AsRef<Path>) -> Result<SyntheticCorpus> {
    generate_synthetic_with(n, seed, out_dir, &SynthConfig::default())
}

/// Writes `images/NNNNNN.png` and `manifest.jsonl` under `out_dir`.
pub fn generate_synthetic_with(
    n: usize,
    seed: u64,
    out_dir: impl AsRef<Path>,
    config: &SynthConfig,
) -> Result<SyntheticCorpus> {
    if n < 20 {
        return Err(Error::InvalidParameter(format!("synthetic corpus needs n >= 20, got {n}")));
    }
    if config.image_size < 32 {
        return Err(Error::InvalidParameter("synthetic images must be at least 32x32".into()));
    }
    let out_dir = out_dir.as_ref();
    let image_dir = out_dir.join("images");
    fs::create_dir_all(&image_dir).map_err(|e| Error::at_path(&image_dir, e))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut listings = Vec::with_capacity(n);
    for k in 0..n {
        let listing_id = k as u64 + 1;
        let latent_quality: f64 = rng.gen();
        let (title, tags, text_signal) = sample_text(&mut rng, config.premium_probability);

        let mean_signal = config.premium_probability * PREMIUM_TOKENS.len() as f64;
        let logit = config.quality_weight * (latent_quality - 0.5)
            + config.text_weight * (f64::from(text_signal) - mean_signal);
        let popular = rng.gen::<f64>() < 1.0 / (1.0 + (-logit).exp());
        let (favorites, clicks, purchases) = if popular {
            (rng.gen_range(2..=15), rng.gen_range(10..=60), rng.gen_range(0..=4))
        } else {
            (rng.gen_range(0..=2), rng.gen_range(0..=6), rng.gen_range(0..=1))
        };

        let img = render_listing_image(latent_quality, &mut rng, config)?;
        let rel = format!("images/{listing_id:06}.png");
        save_png(&img, out_dir.join(&rel))?;

        listings.push(SyntheticListing {
            record: ListingRecord {
                listing_id,
                image_path: rel,
                title,
                tags,
                favorites,
                clicks,
                purchases,
            },
            latent_quality,
            text_signal,
            popular,
        });
    }

    let manifest_path = out_dir.join("manifest.jsonl");
    let records: Vec<ListingRecord> = listings.iter().map(|l| l.record.clone()).collect();
    write_manifest(&records, &manifest_path)?;
    Ok(SyntheticCorpus {
        manifest_path,
        listings,
    })
}

fn sample_text(rng: &mut ChaCha8Rng, premium_probability: f64) -> (String, Vec<String>, u32) {
    let mut words = vec![
        *ADJECTIVES.choose(rng).expect("nonempty"),
        *NOUNS.choose(rng).expect("nonempty"),
    ];
    let mut signal = 0;
    for token in PREMIUM_TOKENS {
        if rng.gen::<f64>() < premium_probability {
            let at = rng.gen_range(0..=words.len());
            words.insert(at, token);
            signal += 1;
        }
    }
    let title = words
        .iter()
        .map(|w| {
            let mut c = w.chars();
            c.next()
                .map(|f| f.to_uppercase().chain(c).collect::<String>())
                .unwrap_or_default()
        })
        .collect::<Vec<_>>()
        .join(" ");
    let tags = GENERIC_TAGS
        .choose_multiple(rng, 3)
        .map(|t| t.to_string())
        .collect();
    (title, tags, signal)
}

fn saturated_color(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let mut c = [rng.gen_range(0.05..0.3), rng.gen_range(0.3..0.7), rng.gen_range(0.75..0.95)];
    c.shuffle(rng);
    c
}

/// Procedural product photo. Lower quality means more blur, more clutter and a
/// subject further from its thirds point.
pub fn render_listing_image(quality: f64, rng: &mut ChaCha8Rng, config: &SynthConfig) -> Result<RasterImage> {
    let size = config.image_size;
    let s = size as f64;
    let defect = 1.0 - quality.clamp(0.0, 1.0);

    let base: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.55..0.85));
    let tilt = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)];
    let mut pixels: Vec<[f64; 3]> = (0..size * size)
        .map(|i| {
            let (x, y) = ((i % size) as f64 / s, (i / size) as f64 / s);
            base.map(|b| b + tilt[0] * (x - 0.5) + tilt[1] * (y - 0.5))
        })
        .collect();

    let clutter = (defect * config.max_clutter as f64).round() as usize;
    for _ in 0..clutter {
        let color = saturated_color(rng);
        let (w, h) = (rng.gen_range(4..=14), rng.gen_range(4..=14));
        let (x0, y0) = (rng.gen_range(0..size - w), rng.gen_range(0..size - h));
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                pixels[y * size + x] = color;
            }
        }
    }

    let thirds = [s / 3.0, 2.0 * s / 3.0];
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let offset = defect * config.max_thirds_offset * s;
    let cx = thirds[rng.gen_range(0..2)] + offset * angle.cos();
    let cy = thirds[rng.gen_range(0..2)] + offset * angle.sin();
    let radius = rng.gen_range(0.11..0.16) * s;
    let color = saturated_color(rng);
    for y in 0..size {
        for x in 0..size {
            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            if dx * dx + dy * dy <= radius * radius {
                let stripe = if (x / 2 + y / 2) % 2 == 0 { 0.12 } else { -0.12 };
                pixels[y * size + x] = color.map(|c| c + stripe);
            }
        }
    }

    let img = RasterImage::rgb_from_fn(size, size, |x, y| pixels[y * size + x]);
    let sigma = defect * config.max_blur_sigma;
    if sigma > 0.05 {
        gaussian_blur(&img, sigma)
    } else {
        Ok(img)
    }
}
