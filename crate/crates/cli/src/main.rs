//! `imgq`: batch extraction, visualization, synthesis and evaluation.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use imgq::assembly::{read_vectors, write_csv, write_vectors, ExtractConfig, QualityVector};
use imgq::blur::BlurConfig;
use imgq::composition::MserParams;
use imgq::dataset::{generate_synthetic, read_manifest, ListingRecord};
use imgq::imgcore::load_image;
use imgq::model::{extract_manifest, run_experiment_on, ExperimentConfig, TrainConfig};
use imgq::visual::write_visualization;

/// Share of per-image failures above which `extract` fails.
const MAX_FAILURE_RATE: f64 = 0.10;
const MIN_PER_CLASS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "imgq", version, about = "Image quality features and listing popularity models")]
struct Cli {
    /// Worker threads for per-image extraction.
    #[arg(long, global = true, env = "IMGQ_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract quality vectors for every manifest record into a feature file.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a CSV copy of the vectors.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Render intermediate maps and scalar features for one image.
    Visualize {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Train text, image and multimodal models and print the evaluation report.
    TrainEval {
        #[arg(long)]
        manifest: PathBuf,
        /// Reuse a feature file instead of extracting.
        #[arg(long)]
        features: Option<PathBuf>,
        /// Directory for the per-modality model files [default: <manifest dir>/models]
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "IMGQ_SEED", default_value_t = 3)]
        seed: u64,
        #[arg(long, value_parser = ["median", "positive"], default_value = "median")]
        binarize: String,
        #[arg(long, default_value_t = 1e-4)]
        l2: f64,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[command(flatten)]
        extract: FeatureArgs,
    },
    /// Generate a synthetic listing corpus.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long, env = "IMGQ_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct FeatureArgs {
    /// Frequency-blur threshold as a multiple of the mean non-DC magnitude.
    #[arg(long, default_value_t = 5.0)]
    theta: f64,
    #[arg(long, default_value_t = 5)]
    mser_delta: u8,
    #[arg(long, default_value_t = 1e-4)]
    mser_min_area: f64,
    #[arg(long, default_value_t = 0.25)]
    mser_max_area: f64,
    #[arg(long, default_value_t = 0.25)]
    mser_max_variation: f64,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<imgq::Error> for Failure {
    fn from(e: imgq::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

impl FeatureArgs {
    fn config(&self) -> Result<ExtractConfig, Failure> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(usage("--theta must be a positive number"));
        }
        if self.mser_delta == 0 {
            return Err(usage("--mser-delta must be at least 1"));
        }
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !in_unit(self.mser_min_area) || !in_unit(self.mser_max_area) || self.mser_min_area > self.mser_max_area {
            return Err(usage("MSER area limits must satisfy 0 < min <= max <= 1"));
        }
        if !(self.mser_max_variation > 0.0 && self.mser_max_variation.is_finite()) {
            return Err(usage("--mser-max-variation must be positive"));
        }
        Ok(ExtractConfig {
            blur: BlurConfig {
                theta_multiplier: self.theta,
                ..BlurConfig::default()
            },
            mser: MserParams {
                delta: self.mser_delta,
                min_area: self.mser_min_area,
                max_area: self.mser_max_area,
                max_variation: self.mser_max_variation,
            },
            ..ExtractConfig::default()
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    match cli.command {
        Command::Extract {
            manifest,
            out,
            csv,
            features,
        } => cmd_extract(&manifest, &out, csv.as_deref(), &features.config()?),
        Command::Visualize { image, out, features } => cmd_visualize(&image, &out, &features.config()?),
        Command::TrainEval {
            manifest,
            features,
            out,
            seed,
            binarize,
            l2,
            lr,
            epochs,
            test_fraction,
            extract,
        } => {
            if !(test_fraction > 0.0 && test_fraction < 1.0) {
                return Err(usage("--test-fraction must lie in (0, 1)"));
            }
            if !(l2 >= 0.0 && l2.is_finite()) {
                return Err(usage("--l2 must be a finite number >= 0"));
            }
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(usage("--lr must be a positive number"));
            }
            let config = ExperimentConfig {
                policy: binarize.parse().map_err(|e: imgq::Error| usage(e.to_string()))?,
                test_fraction,
                seed,
                train: TrainConfig {
                    l2,
                    lr,
                    epochs,
                    seed,
                    ..TrainConfig::default()
                },
                extract: extract.config()?,
            };
            cmd_train_eval(&manifest, features.as_deref(), out.as_deref(), &config)
        }
        Command::Synth { n, seed, out } => {
            if n < 20 {
                return Err(usage(format!("--n must be at least 20, got {n}")));
            }
            let corpus = generate_synthetic(n, seed, &out)?;
            println!("{}", corpus.manifest_path.display());
            Ok(())
        }
    }
}

/// Extracts every record, logging and dropping failures.
fn extract_records(manifest: &Path, records: &[ListingRecord], config: &ExtractConfig) -> Extracted {
    let results = extract_manifest(manifest, records, config);
    let mut vectors = Vec::with_capacity(records.len());
    let mut failures = 0usize;
    for (record, result) in records.iter().zip(results) {
        match result {
            Ok(q) => vectors.push((record.listing_id, q)),
            Err(e) => {
                failures += 1;
                log::warn!("listing {}: skipped: {e}", record.listing_id);
            }
        }
    }
    Extracted {
        vectors,
        failures,
        total: records.len(),
    }
}

struct Extracted {
    vectors: Vec<(u64, QualityVector)>,
    failures: usize,
    total: usize,
}

impl Extracted {
    fn check_failure_rate(&self) -> Result<(), Failure> {
        if self.failures as f64 > MAX_FAILURE_RATE * self.total as f64 {
            return Err(Failure::Runtime(anyhow!(
                "{} of {} images failed to extract",
                self.failures,
                self.total
            )));
        }
        Ok(())
    }
}

fn cmd_extract(manifest: &Path, out: &Path, csv: Option<&Path>, config: &ExtractConfig) -> Result<(), Failure> {
    let records = read_manifest(manifest)?;
    let extracted = extract_records(manifest, &records, config);
    write_vectors(&extracted.vectors, out)?;
    if let Some(csv) = csv {
        write_csv(&extracted.vectors, csv)?;
    }
    extracted.check_failure_rate()
}

fn cmd_visualize(image: &Path, out: &Path, config: &ExtractConfig) -> Result<(), Failure> {
    let img = load_image(image)?;
    for path in write_visualization(&img, out, config)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_train_eval(
    manifest: &Path,
    features: Option<&Path>,
    out: Option<&Path>,
    config: &ExperimentConfig,
) -> Result<(), Failure> {
    let records = read_manifest(manifest)?;
    let vectors = match features {
        Some(path) => read_vectors(path)?,
        None => {
            let extracted = extract_records(manifest, &records, &config.extract);
            extracted.check_failure_rate()?;
            extracted.vectors
        }
    };
    let mut by_id: HashMap<u64, QualityVector> = vectors.into_iter().collect();
    let mut kept = Vec::with_capacity(records.len());
    let mut qualities = Vec::with_capacity(records.len());
    for record in records {
        match by_id.remove(&record.listing_id) {
            Some(q) => {
                kept.push(record);
                qualities.push(q);
            }
            None => log::warn!("listing {}: no quality vector, skipped", record.listing_id),
        }
    }

    let labels = imgq::dataset::label_records(&kept, config.policy)?;
    let positives = labels.iter().filter(|e| e.label == 1).count();
    let negatives = labels.len() - positives;
    if positives.min(negatives) < MIN_PER_CLASS {
        return Err(Failure::Runtime(anyhow!(
            "need at least {MIN_PER_CLASS} listings per class, got {positives} positive and {negatives} negative"
        )));
    }

    let output = run_experiment_on(&kept, &qualities, config)?;
    let model_dir = match out {
        Some(dir) => dir.to_path_buf(),
        None => manifest.parent().unwrap_or(Path::new(".")).join("models"),
    };
    fs::create_dir_all(&model_dir).with_context(|| format!("creating {}", model_dir.display()))?;
    for (modality, model) in &output.models {
        let path = model_dir.join(format!("model_{}.json", modality.name()));
        fs::write(&path, model.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    }
    let report = serde_json::to_string_pretty(&output.report).map_err(|e| Failure::Runtime(e.into()))?;
    println!("{report}");
    Ok(())
}
